#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/ewf.hpp"
#include "ewfkit/mimo.hpp"
#include "ewfkit/whitening.hpp"

namespace ewfkit {

using json = nlohmann::json;

// ---- matrix format: {"rows": M, "cols": N, "data": [[[re, im], ...], ...]} ----

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  try {
    const std::size_t rows = j.at("rows").get<std::size_t>();
    const std::size_t cols = j.at("cols").get<std::size_t>();
    const json& data = j.at("data");
    if (!data.is_array() || data.size() != rows)
      throw IoError("matrix: data row count does not match rows");
    cvector entries;
    entries.reserve(rows * cols);
    for (const json& row : data) {
      if (!row.is_array() || row.size() != cols)
        throw IoError("matrix: data column count does not match cols");
      for (const json& cell : row) {
        if (!cell.is_array() || cell.size() != 2)
          throw IoError("matrix: entries must be [re, im] pairs");
        entries.emplace_back(cell[0].get<double>(), cell[1].get<double>());
      }
    }
    return ComplexMatrix(rows, cols, std::move(entries));
  } catch (const json::exception& e) {
    throw IoError(std::string("matrix: ") + e.what());
  }
}

// ---- whitening filter: {"kind": ..., "scale_c": ..., "f": <matrix>} ----

inline std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::CholeskySwf: return "cholesky_swf";
    case FilterKind::EigenSwf: return "eigen_swf";
    case FilterKind::RotatedSwf: return "rotated_swf";
    default: return "extended_wf";
  }
}

inline FilterKind filter_kind_from_string(const std::string& s) {
  if (s == "cholesky_swf") return FilterKind::CholeskySwf;
  if (s == "eigen_swf") return FilterKind::EigenSwf;
  if (s == "rotated_swf") return FilterKind::RotatedSwf;
  if (s == "extended_wf") return FilterKind::ExtendedWf;
  throw IoError("unknown filter kind: " + s);
}

inline json filter_to_json(const WhiteningFilter& f) {
  return json{{"kind", to_string(f.kind)}, {"scale_c", f.scale_c}, {"f", matrix_to_json(f.f)}};
}

inline WhiteningFilter filter_from_json(const json& j) {
  try {
    return {matrix_from_json(j.at("f")), filter_kind_from_string(j.at("kind").get<std::string>()),
            j.at("scale_c").get<double>()};
  } catch (const json::exception& e) {
    throw IoError(std::string("filter: ") + e.what());
  }
}

// ---- EWF result ----

inline std::string to_string(EwfConstruction c) {
  switch (c) {
    case EwfConstruction::Decorrelate: return "decorrelate";
    case EwfConstruction::Triangularize: return "triangularize";
    default: return "polar";
  }
}

inline EwfConstruction construction_from_string(const std::string& s) {
  if (s == "decorrelate") return EwfConstruction::Decorrelate;
  if (s == "triangularize") return EwfConstruction::Triangularize;
  if (s == "polar") return EwfConstruction::Polar;
  throw IoError("unknown EWF construction: " + s);
}

inline json ewf_to_json(const EwfResult& r) {
  return json{{"w", filter_to_json(r.w)},
              {"byproduct", matrix_to_json(r.byproduct)},
              {"corrective_q", matrix_to_json(r.corrective_q)},
              {"construction", to_string(r.construction)}};
}

inline EwfResult ewf_from_json(const json& j) {
  try {
    return {filter_from_json(j.at("w")), matrix_from_json(j.at("byproduct")),
            matrix_from_json(j.at("corrective_q")),
            construction_from_string(j.at("construction").get<std::string>())};
  } catch (const json::exception& e) {
    throw IoError(std::string("ewf: ") + e.what());
  }
}

// ---- experiment config / report ----

inline BaseFilter base_filter_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "cholesky") return BaseFilter::cholesky();
    if (s == "eigen") return BaseFilter::eigen();
    throw ConfigError("base_filter: expected \"cholesky\", \"eigen\", or {\"random\": {\"seed\": N}}");
  }
  if (j.is_object() && j.contains("random"))
    return BaseFilter::random(j.at("random").at("seed").get<std::uint64_t>());
  throw ConfigError("base_filter: unrecognized form");
}

inline json base_filter_to_json(const BaseFilter& b) {
  switch (b.kind) {
    case BaseFilter::Kind::Cholesky: return "cholesky";
    case BaseFilter::Kind::Eigen: return "eigen";
    default: return json{{"random", {{"seed", b.seed}}}};
  }
}

inline ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    cfg.n_t = j.at("n_t").get<std::size_t>();
    cfg.n_r = j.at("n_r").get<std::size_t>();
    cfg.constellation = j.at("constellation").get<std::string>();
    cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
    cfg.trials = j.at("trials").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    const json& noise = j.at("noise");
    if (noise.contains("sigma")) {
      cfg.noise_sigma = matrix_from_json(noise.at("sigma"));
    } else if (noise.contains("random_spd")) {
      RandomSpdSpec spec;
      spec.seed = noise.at("random_spd").at("seed").get<std::uint64_t>();
      if (noise.at("random_spd").contains("condition_number"))
        spec.condition_number = noise.at("random_spd").at("condition_number").get<double>();
      cfg.noise_random_spd = spec;
    } else {
      throw ConfigError("noise: expected \"sigma\" or \"random_spd\"");
    }
    if (j.contains("base_filter")) cfg.base_filter = base_filter_from_json(j.at("base_filter"));
    if (j.contains("noise_scale")) cfg.noise_scale = j.at("noise_scale").get<double>();
    if (j.contains("channel")) cfg.channel = matrix_from_json(j.at("channel"));
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline json report_to_json(const ExperimentReport& r) {
  json points = json::array();
  for (const SnrPointReport& p : r.points) {
    auto det = [](const DetectorStats& s) {
      return json{{"ser", s.ser},
                  {"ber", s.ber},
                  {"symbol_errors", s.symbol_errors},
                  {"bit_errors", s.bit_errors}};
    };
    points.push_back(json{{"snr_db", p.snr_db},
                          {"trials", p.trials},
                          {"agree_fraction", p.agree_fraction},
                          {"mean_objective_gap", p.mean_objective_gap},
                          {"plain", det(p.plain)},
                          {"qr", det(p.qr)},
                          {"ewf", det(p.ewf)}});
  }
  return json{{"n_t", r.n_t},
              {"n_r", r.n_r},
              {"constellation", r.constellation},
              {"points", std::move(points)}};
}

/// One row per SNR point and detector. Doubles printed with %.17g so equal
/// runs produce byte-identical files.
inline std::string report_to_csv(const ExperimentReport& r) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "snr_db,detector,ser,ber,trials,agree_fraction\n";
  for (const SnrPointReport& p : r.points) {
    const std::pair<const char*, const DetectorStats*> dets[] = {
        {"plain", &p.plain}, {"qr", &p.qr}, {"ewf", &p.ewf}};
    for (const auto& [name, s] : dets)
      out << num(p.snr_db) << ',' << name << ',' << num(s->ser) << ',' << num(s->ber) << ','
          << p.trials << ',' << num(p.agree_fraction) << '\n';
  }
  return out.str();
}

// ---- files ----

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ewfkit
