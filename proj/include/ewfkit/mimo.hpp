#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/constellation.hpp"
#include "ewfkit/ewf.hpp"
#include "ewfkit/stats.hpp"
#include "ewfkit/whitening.hpp"

namespace ewfkit {

inline constexpr std::size_t kSearchCap = std::size_t{1} << 20;

/// Channel model y = H x + v with colored interference-plus-noise v.
struct ChannelInstance {
  ComplexMatrix h;  // N_R x N_T, full column rank
  CovarianceModel noise_cov;
  Constellation constellation;

  ChannelInstance(ComplexMatrix h_in, CovarianceModel cov, Constellation c)
      : h(std::move(h_in)), noise_cov(std::move(cov)), constellation(std::move(c)) {
    if (h.rows() != noise_cov.dim())
      throw DimensionMismatch("ChannelInstance: channel rows do not match noise covariance");
    if (h.cols() > h.rows())
      throw DimensionMismatch("ChannelInstance: more transmit than receive antennas");
    qr_posdiag(h);  // full column rank, detected not assumed
  }

  std::size_t n_t() const { return h.cols(); }
  std::size_t n_r() const { return h.rows(); }
};

/// Which SWF the detector front end is built on.
struct BaseFilter {
  enum class Kind { Cholesky, Eigen, Random };
  Kind kind = Kind::Cholesky;
  std::uint64_t seed = 0;

  static BaseFilter cholesky() { return {Kind::Cholesky, 0}; }
  static BaseFilter eigen() { return {Kind::Eigen, 0}; }
  static BaseFilter random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

inline WhiteningFilter make_base_filter(const CovarianceModel& cov, const BaseFilter& base) {
  switch (base.kind) {
    case BaseFilter::Kind::Cholesky: return swf_cholesky(cov);
    case BaseFilter::Kind::Eigen: return swf_eigen(cov);
    default: return random_swf(cov, base.seed);
  }
}

/// Everything the three detector formulations need, prepared once per
/// channel: the SWF F, the whitened channel H_hat = F H, its thin QR, and
/// the triangularizing EWF built on the same F.
struct DetectorBank {
  ChannelInstance chan;
  WhiteningFilter f;
  ComplexMatrix h_hat;
  QRFactors qr_of_h_hat;
  ComplexMatrix qh;  // qr_of_h_hat.q^H, cached
  EwfResult ewf;
};

inline DetectorBank build_detector_bank(const ChannelInstance& chan, const BaseFilter& base) {
  WhiteningFilter f = make_base_filter(chan.noise_cov, base);
  ComplexMatrix h_hat = matmul(f.f, chan.h);
  QRFactors qr = qr_posdiag(h_hat);
  EwfResult ewf = ewf_triangularize(chan.noise_cov, chan.h, f);
  // both paths must land on the unique positive-diagonal R
  if (max_abs_entry(qr.r - ewf.byproduct) > 1e-8)
    throw InternalInvariantViolation("DetectorBank: QR and EWF triangular factors disagree");
  ComplexMatrix qh = conj_transpose(qr.q);
  return {chan, std::move(f), std::move(h_hat), std::move(qr), std::move(qh), std::move(ewf)};
}

/// y = H x + noise_scale * v for one trial. The noise draw depends only on
/// (noise_seed, trial).
inline cvector transmit(const ChannelInstance& chan, const std::vector<unsigned>& x_indices,
                        std::uint64_t noise_seed, std::uint64_t trial, double noise_scale = 1.0) {
  if (x_indices.size() != chan.n_t())
    throw DimensionMismatch("transmit: symbol count does not match transmit antennas");
  cvector s(chan.n_t());
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (x_indices[k] >= chan.constellation.points.size())
      throw BadSymbolIndex("transmit: symbol index out of range");
    s[k] = chan.constellation.points[x_indices[k]];
  }
  cvector y = matvec(chan.h, s);
  const SampleBatch noise = sample_colored(chan.noise_cov, 1, derive_seed(noise_seed, trial));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += noise_scale * noise.samples[0][i];
  return y;
}

struct Detection {
  std::vector<unsigned> x_hat;
  double objective = 0.0;
  int frontend_matvecs = 0;  // matrix-vector products spent filtering y
};

namespace detail {

inline std::size_t candidate_count(std::size_t card, std::size_t n_t) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < n_t; ++k) {
    if (count > kSearchCap / card)
      throw SearchSpaceTooLarge("detector: candidate space exceeds the search cap");
    count *= card;
  }
  return count;
}

/// ‖target − A x‖² for the candidate symbol vector x.
inline double residual_norm_sq(const ComplexMatrix& a, const cvector& target, const cvector& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cdouble r = target[i];
    for (std::size_t j = 0; j < a.cols(); ++j) r -= a(i, j) * x[j];
    total += std::norm(r);
  }
  return total;
}

/// Exhaustive minimization over all |C|^{N_T} symbol vectors, visited in
/// lexicographic index order; strict improvement keeps the first (and so
/// lexicographically smallest) minimizer.
template <typename Objective>
Detection exhaustive_argmin(const Constellation& c, std::size_t n_t, Objective&& objective) {
  const std::size_t card = c.points.size();
  candidate_count(card, n_t);

  std::vector<unsigned> idx(n_t, 0);
  cvector x(n_t, c.points[0]);
  Detection best{idx, std::numeric_limits<double>::infinity(), 0};
  while (true) {
    const double obj = objective(x);
    if (obj < best.objective) {
      best.objective = obj;
      best.x_hat = idx;
    }
    std::size_t pos = n_t;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < card) {
        x[pos] = c.points[idx[pos]];
        break;
      }
      idx[pos] = 0;
      x[pos] = c.points[0];
      if (pos == 0) return best;
    }
    if (n_t == 0) return best;
  }
}

}  // namespace detail

/// ML detection on the whitened model: argmin ‖F y − H_hat x‖².
inline Detection detect_plain(const DetectorBank& bank, const cvector& y) {
  const cvector y_hat = matvec(bank.f.f, y);
  Detection d = detail::exhaustive_argmin(
      bank.chan.constellation, bank.chan.n_t(),
      [&](const cvector& x) { return detail::residual_norm_sq(bank.h_hat, y_hat, x); });
  d.frontend_matvecs = 1;
  return d;
}

/// QR-simplified detection: argmin ‖Q^H F y − R x‖². Two filtering products
/// per received vector: F, then Q^H.
inline Detection detect_qr(const DetectorBank& bank, const cvector& y) {
  const cvector f_y = matvec(bank.f.f, y);
  const cvector z = matvec(bank.qh, f_y);
  Detection d = detail::exhaustive_argmin(
      bank.chan.constellation, bank.chan.n_t(),
      [&](const cvector& x) { return detail::residual_norm_sq(bank.qr_of_h_hat.r, z, x); });
  d.frontend_matvecs = 2;
  return d;
}

/// EWF-simplified detection: the filter W triangularizes H by itself, so a
/// single product W y replaces the F-then-Q^H stage: argmin ‖W y − R x‖².
inline Detection detect_ewf(const DetectorBank& bank, const cvector& y) {
  const cvector y_hat = matvec(bank.ewf.w.f, y);
  Detection d = detail::exhaustive_argmin(
      bank.chan.constellation, bank.chan.n_t(),
      [&](const cvector& x) { return detail::residual_norm_sq(bank.ewf.byproduct, y_hat, x); });
  d.frontend_matvecs = 1;
  return d;
}

/// Objective of one named candidate under each formulation; used to verify
/// that the formulations differ only by an x-independent constant.
inline double objective_plain_at(const DetectorBank& bank, const cvector& y,
                                 const std::vector<unsigned>& idx) {
  cvector x(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) x[k] = bank.chan.constellation.points.at(idx[k]);
  return detail::residual_norm_sq(bank.h_hat, matvec(bank.f.f, y), x);
}

inline double objective_qr_at(const DetectorBank& bank, const cvector& y,
                              const std::vector<unsigned>& idx) {
  cvector x(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) x[k] = bank.chan.constellation.points.at(idx[k]);
  return detail::residual_norm_sq(bank.qr_of_h_hat.r, matvec(bank.qh, matvec(bank.f.f, y)), x);
}

inline double objective_ewf_at(const DetectorBank& bank, const cvector& y,
                               const std::vector<unsigned>& idx) {
  cvector x(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) x[k] = bank.chan.constellation.points.at(idx[k]);
  return detail::residual_norm_sq(bank.ewf.byproduct, matvec(bank.ewf.w.f, y), x);
}

/// One trial, all three formulations.
struct DetectionRecord {
  std::vector<unsigned> x_true;
  Detection plain, qr, ewf;
  bool agree = false;
};

inline DetectionRecord detect_all(const DetectorBank& bank, const cvector& y,
                                  std::vector<unsigned> x_true) {
  DetectionRecord rec;
  rec.x_true = std::move(x_true);
  rec.plain = detect_plain(bank, y);
  rec.qr = detect_qr(bank, y);
  rec.ewf = detect_ewf(bank, y);
  rec.agree = rec.plain.x_hat == rec.qr.x_hat && rec.qr.x_hat == rec.ewf.x_hat;
  return rec;
}

/// Noise covariance source: an explicit matrix or a seeded random SPD draw.
struct RandomSpdSpec {
  std::uint64_t seed = 0;
  double condition_number = 10.0;
};

struct ExperimentConfig {
  std::size_t n_t = 0;
  std::size_t n_r = 0;
  std::string constellation = "qpsk";
  std::vector<double> snr_db;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::optional<ComplexMatrix> noise_sigma;
  std::optional<RandomSpdSpec> noise_random_spd;
  BaseFilter base_filter = BaseFilter::cholesky();
  double noise_scale = 1.0;
  std::optional<ComplexMatrix> channel;  // fixed H; drawn from the seed when absent
};

struct DetectorStats {
  std::size_t symbol_errors = 0;
  std::size_t bit_errors = 0;
  double ser = 0.0;
  double ber = 0.0;
};

struct SnrPointReport {
  double snr_db = 0.0;
  std::size_t trials = 0;
  double agree_fraction = 1.0;
  double mean_objective_gap = 0.0;  // mean |objective_plain - objective_qr|
  DetectorStats plain, qr, ewf;
};

struct ExperimentReport {
  std::size_t n_t = 0;
  std::size_t n_r = 0;
  std::string constellation;
  std::vector<SnrPointReport> points;
};

namespace detail {

inline constexpr std::uint64_t kStreamChannel = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamSymbols = 3;

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.n_t < 1 || cfg.n_r < cfg.n_t)
    throw ConfigError("config: need n_r >= n_t >= 1");
  if (cfg.snr_db.empty()) throw ConfigError("config: snr_db list is empty");
  if (cfg.noise_sigma.has_value() == cfg.noise_random_spd.has_value())
    throw ConfigError("config: exactly one of noise sigma / random_spd must be given");
  if (!(cfg.noise_scale >= 0.0)) throw ConfigError("config: noise_scale must be >= 0");
  if (cfg.noise_sigma && (cfg.noise_sigma->rows() != cfg.n_r || !cfg.noise_sigma->square()))
    throw ConfigError("config: noise sigma must be n_r x n_r");
  if (cfg.channel && (cfg.channel->rows() != cfg.n_r || cfg.channel->cols() != cfg.n_t))
    throw ConfigError("config: channel must be n_r x n_t");
}

inline ComplexMatrix draw_channel(const ExperimentConfig& cfg) {
  if (cfg.channel) return *cfg.channel;
  const CounterRng stream = CounterRng(cfg.seed).derive(kStreamChannel);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    ComplexMatrix h = gaussian_matrix(cfg.n_r, cfg.n_t, stream.derive(attempt).key());
    try {
      qr_posdiag(h);
      return h;
    } catch (const RankDeficient&) {
      continue;  // resample; measure-zero event for Gaussian entries
    }
  }
  throw ConfigError("config: could not draw a full-column-rank channel");
}

inline unsigned thread_budget(std::size_t work) {
  unsigned budget = std::thread::hardware_concurrency();
  if (budget == 0) budget = 1;
  if (const char* env = std::getenv("EWFKIT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) budget = static_cast<unsigned>(v);
  }
  if (static_cast<std::size_t>(budget) > work) budget = static_cast<unsigned>(work);
  return budget == 0 ? 1 : budget;
}

struct TrialOutcome {
  std::array<std::size_t, 3> symbol_errors{};  // plain, qr, ewf
  std::array<std::size_t, 3> bit_errors{};
  bool agree = false;
  double objective_gap = 0.0;
};

inline void tally(const std::vector<unsigned>& truth, const std::vector<unsigned>& decided,
                  std::size_t& sym, std::size_t& bits) {
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] != decided[k]) ++sym;
    bits += static_cast<std::size_t>(std::popcount(truth[k] ^ decided[k]));
  }
}

}  // namespace detail

/// Monte Carlo run over the configured SNR grid. Trials are independent
/// given their derived seeds and may execute on several threads; results
/// are reduced in trial order, so the report does not depend on the
/// execution order. The agreement fraction across the three formulations
/// is part of the report and is expected to be exactly 1.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  const Constellation constellation = Constellation::from_name(cfg.constellation);
  const ComplexMatrix h = detail::draw_channel(cfg);
  const ComplexMatrix sigma0 = cfg.noise_sigma
                                   ? *cfg.noise_sigma
                                   : random_hermitian_pd(cfg.n_r, cfg.noise_random_spd->seed,
                                                         cfg.noise_random_spd->condition_number);

  const double signal_trace = trace(matmul(h, conj_transpose(h))).real();
  const double sigma_trace = trace(sigma0).real();

  ExperimentReport report{cfg.n_t, cfg.n_r, constellation.name, {}};
  for (std::size_t snr_idx = 0; snr_idx < cfg.snr_db.size(); ++snr_idx) {
    const double snr_db = cfg.snr_db[snr_idx];
    // scale Sigma so that trace(HH^H)/trace(Sigma) hits the target SNR
    const double alpha = signal_trace / (sigma_trace * std::pow(10.0, snr_db / 10.0));
    const CovarianceModel cov(alpha * sigma0);
    const ChannelInstance chan(h, cov, constellation);
    const DetectorBank bank = build_detector_bank(chan, cfg.base_filter);

    const std::uint64_t noise_key =
        CounterRng(cfg.seed).derive(detail::kStreamNoise).derive(snr_idx).key();
    const CounterRng symbol_root = CounterRng(cfg.seed).derive(detail::kStreamSymbols).derive(snr_idx);
    const std::size_t card = constellation.points.size();

    std::vector<detail::TrialOutcome> outcomes(cfg.trials);
    auto run_range = [&](std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const CounterRng symbol_stream = symbol_root.derive(t);
        std::vector<unsigned> x_true(cfg.n_t);
        for (std::size_t a = 0; a < cfg.n_t; ++a)
          x_true[a] = static_cast<unsigned>(symbol_stream.uniform(a) * static_cast<double>(card));
        const cvector y = transmit(chan, x_true, noise_key, t, cfg.noise_scale);
        const DetectionRecord rec = detect_all(bank, y, x_true);

        detail::TrialOutcome& out = outcomes[t];
        detail::tally(rec.x_true, rec.plain.x_hat, out.symbol_errors[0], out.bit_errors[0]);
        detail::tally(rec.x_true, rec.qr.x_hat, out.symbol_errors[1], out.bit_errors[1]);
        detail::tally(rec.x_true, rec.ewf.x_hat, out.symbol_errors[2], out.bit_errors[2]);
        out.agree = rec.agree;
        out.objective_gap = std::abs(rec.plain.objective - rec.qr.objective);
      }
    };

    const unsigned threads = detail::thread_budget(cfg.trials);
    if (threads <= 1) {
      run_range(0, cfg.trials);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (cfg.trials + threads - 1) / threads;
      for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(cfg.trials, begin + chunk);
        if (begin < end) pool.emplace_back(run_range, begin, end);
      }
      for (std::thread& th : pool) th.join();
    }

    SnrPointReport point;
    point.snr_db = snr_db;
    point.trials = cfg.trials;
    std::size_t agree_count = 0;
    double gap_sum = 0.0;
    std::array<DetectorStats*, 3> stats{&point.plain, &point.qr, &point.ewf};
    for (const detail::TrialOutcome& out : outcomes) {
      for (std::size_t d = 0; d < 3; ++d) {
        stats[d]->symbol_errors += out.symbol_errors[d];
        stats[d]->bit_errors += out.bit_errors[d];
      }
      agree_count += out.agree ? 1 : 0;
      gap_sum += out.objective_gap;
    }
    if (cfg.trials > 0) {
      const double symbols = static_cast<double>(cfg.trials * cfg.n_t);
      const double bits = symbols * constellation.bits_per_symbol;
      for (DetectorStats* s : stats) {
        s->ser = static_cast<double>(s->symbol_errors) / symbols;
        s->ber = static_cast<double>(s->bit_errors) / bits;
      }
      point.agree_fraction = static_cast<double>(agree_count) / static_cast<double>(cfg.trials);
      point.mean_objective_gap = gap_sum / static_cast<double>(cfg.trials);
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

}  // namespace ewfkit
