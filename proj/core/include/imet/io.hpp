#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "imet/discs.hpp"
#include "imet/domains.hpp"
#include "imet/functionals.hpp"
#include "imet/geodesics.hpp"
#include "imet/metrics.hpp"

namespace imet {

using Json = nlohmann::json;

/// Complex vectors as [re, im, re, im, ...].
Json to_json(const CVec& z);
CVec cvec_from_json(const Json& j);

/// {"type": "ball", "n": 2}, {"type": "annulus", "r_minus": 0.25, "r_plus": 1},
/// {"type": "ellipsoid", "n": 2, "weights": [...], "exponents": [...],
///  "perturbation": "x1^4", "norm_powers": [{"coefficient", "power", "center"}]},
/// also "disc", "polydisc", "reinhardt" (alpha) and "cap" (n, level).
Json to_json(const ModelDomain& m);
ModelDomain model_from_json(const Json& j);

/// {"dimension", "degree", "coefficients": row-major interleaved re/im}; doubles
/// are written with round-trip precision, so the round trip is exact.
Json to_json(const AnalyticDisc& f);
AnalyticDisc disc_from_json(const Json& j);

Json to_json(const HoloFunctional& F);
HoloFunctional functional_from_json(const Json& j);

/// Missing keys keep their defaults.
Json to_json(const Budget& b);
Budget budget_from_json(const Json& j, Budget base = {});

Json to_json(const ComparisonReport& r);
Json to_json(const StationaryCertificate& c);

/// One row per pair: z, w, c_low, k_up, l_up, gap, flags. Vectors are written
/// as re:im pairs joined by ';'; missing values are empty.
std::string comparison_csv_header();
std::string comparison_csv_row(const ComparisonReport& r);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Json to_json(const Table& t);
Table table_from_json(const Json& j);
std::string to_csv(const Table& t);

/// Creates parent directories. Throws Error on failure.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// IMET_OUT_DIR when set and non-empty, otherwise fallback.
std::string output_directory(const std::string& fallback);

}  // namespace imet
