#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "crf/closed_form.hpp"
#include "crf/majorant.hpp"
#include "crf/scenario.hpp"
#include "crf/verifier.hpp"

namespace crf {

using Json = nlohmann::ordered_json;

struct ReportFile {
  std::string name;
  std::string content;
};

/// Files of one run, written together into one directory.
struct ReportBundle {
  std::vector<ReportFile> files;

  void add(std::string name, std::string content);
  const ReportFile* find(const std::string& name) const;
  /// Creates `dir` if needed and writes every file, replacing old ones.
  void write(const std::string& dir) const;
};

Json conventions_json();
Json config_json(const Scenario& sc, const std::string& command);
Json to_json(const InitialData& d);
Json to_json(const Solution& s);
Json to_json(const ResidualReport& r);
Json to_json(const ClassIntegral& c);
Json to_json(const CurvatureReport& r);
Json to_json(const SmoothnessReport& r);
Json to_json(const MajorantReport& r);
Json to_json(const RicciSpectrum& s);
Json to_json(const Polynomial& p);
Json to_json(const CalibrationReport& r);

/// Nonzero coefficients within the valid degree, ascending in t, graded-lex
/// in space. Columns: t_order,entry,degree,exponents,re,im.
std::string coefficients_csv(const TJet& f, const std::string& entry);
std::string coefficients_csv(const TJetMatrix& g, const std::string& entry_prefix);

/// Columns: check,identity,t_order,degree,residual,scale,tolerance,verdict.
std::string residuals_csv(const std::vector<const ResidualReport*>& reports);

/// Columns: quantity,k,value. Quantities: P, w_inv_num, w_inv_den, w_inv_series.
std::string closed_form_csv(const Polynomial& P, const RationalT& w, int order);
/// Columns: kappa,g_deviation,w_deviation,matched.
std::string calibration_csv(const CalibrationReport& r);
/// Columns: m,C_m.
std::string majorant_sequence_csv(const MajorantReport& r);
/// Columns: m,r,inequality,lhs,rhs,points,verdict.
std::string majorant_checks_csv(const MajorantReport& r);
/// Columns: p,q,s,alpha,beta,weight,bound.
std::string nonlinearity_terms_csv(const MajorantReport& r);
/// Columns: p,C,r,hypothesis_lhs,hypothesis_rhs,lhs,rhs,points,verdict.
std::string cauchy_check_csv(const MajorantReport& r);

/// UTC, second resolution.
std::string utc_timestamp();

}  // namespace crf
