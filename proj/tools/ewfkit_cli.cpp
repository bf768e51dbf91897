// ewfkit command-line front end.
//
// Exit codes: 0 success, 1 semantic check failed, 2 input/usage error,
// 3 internal invariant violation (including detector disagreement).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <ewfkit/ewfkit.hpp>

namespace {

using namespace ewfkit;

int cmd_gen_cov(std::size_t dim, std::uint64_t seed, const std::string& out, double condition) {
  const ComplexMatrix sigma = random_hermitian_pd(dim, seed, condition);
  const CovarianceModel certified(sigma);  // certify what we are about to write
  (void)certified;
  write_json_file(out, matrix_to_json(sigma));
  std::printf("wrote %zux%zu covariance (condition number %.6g) to %s\n", dim, dim, condition,
              out.c_str());
  return 0;
}

int cmd_whiten(const std::string& cov_path, const std::string& method, std::uint64_t seed,
               const std::string& out) {
  const CovarianceModel cov(matrix_from_json(read_json_file(cov_path)));
  WhiteningFilter filter;
  if (method == "cholesky")
    filter = swf_cholesky(cov);
  else if (method == "eigen")
    filter = swf_eigen(cov);
  else
    filter = random_swf(cov, seed);
  write_json_file(out, filter_to_json(filter));
  std::printf("method: %s\nresidual: %.6g\n", method.c_str(),
              check_swf(filter.f, cov).residual);
  return 0;
}

int cmd_verify(const std::string& cov_path, const std::string& filter_path, std::size_t samples,
               std::uint64_t seed) {
  const CovarianceModel cov(matrix_from_json(read_json_file(cov_path)));
  const WhiteningFilter filter = filter_from_json(read_json_file(filter_path));
  const SwfCheck swf = check_swf(filter.f, cov);
  const WfCheck wf = check_wf(filter.f, cov);
  std::printf("is_swf: %s\nis_wf: %s\nc: %.6g\nresidual: %.6g\n", swf.is_swf ? "true" : "false",
              wf.is_wf ? "true" : "false", wf.c, swf.residual);
  if (samples > 0) {
    const WhitenessResult mc = whiteness_test(filter, cov, samples, seed);
    std::printf("monte_carlo: %s (max_dev %.6g, threshold %.6g, n %zu)\n",
                mc.pass ? "pass" : "fail", mc.max_dev,
                8.0 / std::sqrt(static_cast<double>(samples)), samples);
  }
  return swf.is_swf ? 0 : 1;
}

int cmd_ewf(const std::string& cov_path, const std::string& construction,
            const std::string& secondary_path, const std::string& out) {
  const CovarianceModel cov(matrix_from_json(read_json_file(cov_path)));
  const ComplexMatrix secondary = matrix_from_json(read_json_file(secondary_path));

  EwfResult result;
  if (construction == "decorrelate") {
    result = ewf_decorrelate(cov, CovarianceModel(secondary));
    const ComplexMatrix achieved =
        matmul(result.w.f, matmul(secondary, conj_transpose(result.w.f)));
    double off = 0.0;
    for (std::size_t i = 0; i < achieved.rows(); ++i)
      for (std::size_t j = 0; j < achieved.cols(); ++j)
        if (i != j) off = std::max(off, std::abs(achieved(i, j)));
    std::printf("off_diagonal_max: %.6g\n", off);
  } else if (construction == "triangularize") {
    result = ewf_triangularize(cov, secondary);
    const ComplexMatrix achieved = matmul(result.w.f, secondary);
    double low = 0.0;
    for (std::size_t i = 0; i < achieved.rows(); ++i)
      for (std::size_t j = 0; j < std::min(i, achieved.cols()); ++j)
        low = std::max(low, std::abs(achieved(i, j)));
    std::printf("strict_lower_max: %.6g\n", low);
  } else {
    result = ewf_polar(cov, secondary);
    const ComplexMatrix achieved = matmul(result.w.f, secondary);
    const EigenFactors ef = eig_hermitian(hermitian_part(achieved));
    std::printf("asymmetry_max: %.6g\nmin_eigenvalue: %.6g\n", hermitian_deviation(achieved),
                ef.lambda.back());
  }
  std::printf("whitening_residual: %.6g\n", check_swf(result.w.f, cov).residual);
  write_json_file(out, ewf_to_json(result));
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_json,
                 const std::string& out_csv) {
  const ExperimentConfig cfg = config_from_json(read_json_file(config_path));
  const ExperimentReport report = run_experiment(cfg);
  write_json_file(out_json, report_to_json(report));
  write_text_file(out_csv, report_to_csv(report));

  bool all_agree = true;
  for (const SnrPointReport& p : report.points) {
    std::printf("snr %.6g dB: ser plain %.6g qr %.6g ewf %.6g, agree %.6g\n", p.snr_db,
                p.plain.ser, p.qr.ser, p.ewf.ser, p.agree_fraction);
    if (p.agree_fraction < 1.0) all_agree = false;
  }
  if (!all_agree) {
    std::fprintf(stderr, "error: detector formulations disagreed on some trials\n");
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear whitening filters, extended whitening filters, and a MIMO ML detection harness"};
  app.require_subcommand(1);

  // gen-cov
  auto* gen = app.add_subcommand("gen-cov", "generate a random Hermitian PD covariance");
  std::size_t gen_dim = 2;
  std::uint64_t gen_seed = 0;
  double gen_condition = 10.0;
  std::string gen_out;
  gen->add_option("--dim", gen_dim, "matrix dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output path (matrix JSON)")->required();
  gen->add_option("--condition-number", gen_condition, "eigenvalue spread")->check(CLI::PositiveNumber);

  // whiten
  auto* whiten = app.add_subcommand("whiten", "build a standard whitening filter");
  std::string whiten_cov, whiten_method, whiten_out;
  std::uint64_t whiten_seed = 0;
  whiten->add_option("--cov", whiten_cov, "covariance path")->required();
  whiten->add_option("--method", whiten_method, "cholesky|eigen|random")
      ->required()
      ->check(CLI::IsMember({"cholesky", "eigen", "random"}));
  whiten->add_option("--seed", whiten_seed, "seed for --method random");
  whiten->add_option("--out", whiten_out, "output path (filter JSON)")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "check a filter against a covariance");
  std::string verify_cov, verify_filter;
  std::size_t verify_samples = 0;
  std::uint64_t verify_seed = 0;
  verify->add_option("--cov", verify_cov, "covariance path")->required();
  verify->add_option("--filter", verify_filter, "filter path")->required();
  verify->add_option("--samples", verify_samples, "Monte Carlo sample count");
  verify->add_option("--seed", verify_seed, "Monte Carlo seed");

  // ewf
  auto* ewf = app.add_subcommand("ewf", "build an extended whitening filter");
  std::string ewf_cov, ewf_construction, ewf_secondary, ewf_out;
  ewf->add_option("--cov", ewf_cov, "primary covariance path")->required();
  ewf->add_option("--construction", ewf_construction, "decorrelate|triangularize|polar")
      ->required()
      ->check(CLI::IsMember({"decorrelate", "triangularize", "polar"}));
  ewf->add_option("--secondary", ewf_secondary, "secondary matrix path")->required();
  ewf->add_option("--out", ewf_out, "output path (EWF JSON)")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the MIMO detection experiment");
  std::string sim_config, sim_json, sim_csv;
  sim->add_option("--config", sim_config, "experiment config path")->required();
  sim->add_option("--out-json", sim_json, "report output path (JSON)")->required();
  sim->add_option("--out-csv", sim_csv, "report output path (CSV)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_cov(gen_dim, gen_seed, gen_out, gen_condition);
    if (whiten->parsed()) return cmd_whiten(whiten_cov, whiten_method, whiten_seed, whiten_out);
    if (verify->parsed()) return cmd_verify(verify_cov, verify_filter, verify_samples, verify_seed);
    if (ewf->parsed()) return cmd_ewf(ewf_cov, ewf_construction, ewf_secondary, ewf_out);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_json, sim_csv);
  } catch (const ewfkit::InternalInvariantViolation& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const ewfkit::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
