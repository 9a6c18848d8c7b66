#include "sublab/mcmc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "sublab/numerics.hpp"

#include <nlohmann/json.hpp>

namespace sublab {

namespace {

/// Box-Muller normal generator with an explicit state so that streams do not
/// depend on library internals.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    // (0, 1]
    return (static_cast<double>(rng_()) + 1.0) * 0x1.0p-64;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double split_rhat(const Eigen::MatrixXd& pts, int col) {
  const std::int64_t K = pts.rows();
  const std::int64_t half = K / 2;
  if (half < 2) return 1.0;
  auto moments = [&](std::int64_t begin, std::int64_t len, double& mean,
                     double& var) {
    mean = 0.0;
    for (std::int64_t i = 0; i < len; ++i) mean += pts(begin + i, col);
    mean /= static_cast<double>(len);
    var = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
      const double d = pts(begin + i, col) - mean;
      var += d * d;
    }
    var /= static_cast<double>(len - 1);
  };
  double m1, v1, m2, v2;
  moments(0, half, m1, v1);
  moments(half, half, m2, v2);
  const double W = 0.5 * (v1 + v2);
  const double mbar = 0.5 * (m1 + m2);
  const double B = static_cast<double>(half) *
                   ((m1 - mbar) * (m1 - mbar) + (m2 - mbar) * (m2 - mbar));
  if (W <= 0.0) return 1.0;
  const double n = static_cast<double>(half);
  const double var_plus = (n - 1.0) / n * W + B / n;
  return std::sqrt(var_plus / W);
}

}  // namespace

double series_ess(const std::vector<double>& series) {
  const std::size_t K = series.size();
  if (K < 8) return static_cast<double>(K);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(K);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(K);
  if (var <= 0.0) return static_cast<double>(K);

  const std::size_t max_lag = std::min<std::size_t>(K / 3, 1000);
  double tau = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < K; ++i)
      c += (series[i] - mean) * (series[i + lag] - mean);
    c /= static_cast<double>(K) * var;
    if (c < 0.05) break;
    tau += 2.0 * c;
  }
  return static_cast<double>(K) / tau;
}

SampleSet mcmc_sample(const MeasureSpec& measure, std::int64_t n,
                      std::uint64_t seed) {
  if (n < 10000)
    fail(ErrorCode::RangeError, "mcmc_sample requires n >= 10^4");
  const FrameSpec& frame = measure.frame;
  const int D = frame.dim;
  const int hd = frame.horizontal_dim();
  const double p = measure.p;

  NormalStream rng(seed);
  auto log_target = [&](const Eigen::VectorXd& v) {
    return -std::pow(kaplan_norm(frame, v), p);
  };

  // Dilation-matched initial scales: center coordinates move like the square
  // of the horizontal ones.
  Eigen::VectorXd scale(D);
  scale.head(hd).setConstant(0.6);
  scale.tail(D - hd).setConstant(0.36);
  double log_gain = 0.0;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(D, 0.3);
  double lx = log_target(x);

  const std::int64_t burn = n / 5;
  const std::int64_t post = n - burn;
  const std::int64_t stride =
      std::max<std::int64_t>(1, (post + 999999) / 1000000);
  const std::int64_t stored = post / stride;

  SampleSet set;
  set.points.resize(stored, D);
  set.seed = seed;
  set.n_requested = n;
  set.p = p;
  set.frame_hash = fnv1a_hex(frame.describe());

  // Welford accumulators for the per-coordinate spread seen in burn-in.
  Eigen::VectorXd run_mean = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd run_m2 = Eigen::VectorXd::Zero(D);
  std::int64_t run_count = 0;

  const int window = 200;
  int window_accepts = 0;
  std::int64_t accepted_post = 0;
  Eigen::VectorXd prop(D);

  std::int64_t store_at = 0;
  for (std::int64_t step = 0; step < n; ++step) {
    const bool in_burn = step < burn;
    const double gain = std::exp(log_gain);
    for (int k = 0; k < D; ++k)
      prop[k] = x[k] + gain * scale[k] * rng.normal();
    const double lp = log_target(prop);
    const double u = rng.uniform();
    const bool accept = std::log(u) < lp - lx;
    if (accept) {
      x = prop;
      lx = lp;
    }

    if (in_burn) {
      window_accepts += accept ? 1 : 0;
      ++run_count;
      for (int k = 0; k < D; ++k) {
        const double d = x[k] - run_mean[k];
        run_mean[k] += d / static_cast<double>(run_count);
        run_m2[k] += d * (x[k] - run_mean[k]);
      }
      if ((step + 1) % window == 0) {
        const double rate =
            static_cast<double>(window_accepts) / static_cast<double>(window);
        log_gain += 0.4 * (rate - 0.3);
        window_accepts = 0;
      }
      if (step + 1 == burn / 2 && run_count > 2 * D) {
        // Re-shape proposals from the observed spread, then keep adapting
        // only the global gain.
        for (int k = 0; k < D; ++k) {
          const double sd =
              std::sqrt(run_m2[k] / static_cast<double>(run_count - 1));
          if (sd > 1e-12) scale[k] = sd;
        }
        log_gain = std::log(2.38 / std::sqrt(static_cast<double>(D)));
      }
    } else {
      accepted_post += accept ? 1 : 0;
      const std::int64_t idx = step - burn;
      if (idx % stride == 0 && store_at < stored)
        set.points.row(store_at++) = x.transpose();
    }
  }

  set.diag.acceptance =
      static_cast<double>(accepted_post) / static_cast<double>(post);
  set.diag.ess.resize(D);
  std::vector<double> series(static_cast<std::size_t>(set.stored()));
  double worst_rhat = 1.0;
  for (int k = 0; k < D; ++k) {
    for (std::int64_t i = 0; i < set.stored(); ++i)
      series[static_cast<std::size_t>(i)] = set.points(i, k);
    set.diag.ess[k] = series_ess(series);
    worst_rhat = std::max(worst_rhat, split_rhat(set.points, k));
  }
  set.diag.split_ratio = worst_rhat;
  set.usable = set.diag.split_ratio <= 1.05 && set.diag.ess.minCoeff() >= 100.0;
  return set;
}

void save_samples(const std::string& path, const SampleSet& set) {
  nlohmann::ordered_json header;
  header["schema"] = 1;
  header["frame_hash"] = set.frame_hash;
  header["p"] = set.p;
  header["seed"] = set.seed;
  header["n"] = set.n_requested;
  header["stored"] = set.stored();
  header["dim"] = set.points.cols();
  header["diagnostics"] = {{"acceptance", set.diag.acceptance},
                           {"min_ess", set.diag.ess.size() > 0
                                           ? set.diag.ess.minCoeff()
                                           : 0.0},
                           {"split_ratio", set.diag.split_ratio}};
  header["usable"] = set.usable;

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << header.dump() << "\n";
  for (std::int64_t i = 0; i < set.points.rows(); ++i)
    for (std::int64_t j = 0; j < set.points.cols(); ++j) {
      const double v = set.points(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  if (!out) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

SampleSet load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::IoError, "missing sample cache header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError,
         std::string("bad sample cache header: ") + e.what());
  }
  SampleSet set;
  set.frame_hash = header.at("frame_hash").get<std::string>();
  set.p = header.at("p").get<double>();
  set.seed = header.at("seed").get<std::uint64_t>();
  set.n_requested = header.at("n").get<std::int64_t>();
  const std::int64_t stored = header.at("stored").get<std::int64_t>();
  const int dim = header.at("dim").get<int>();
  set.diag.acceptance = header.at("diagnostics").at("acceptance").get<double>();
  set.diag.split_ratio =
      header.at("diagnostics").at("split_ratio").get<double>();
  set.diag.ess = Eigen::VectorXd::Constant(
      dim, header.at("diagnostics").at("min_ess").get<double>());
  set.usable = header.at("usable").get<bool>();
  set.points.resize(stored, dim);
  for (std::int64_t i = 0; i < stored; ++i)
    for (int j = 0; j < dim; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!in) fail(ErrorCode::IoError, "sample cache truncated");
      set.points(i, j) = v;
    }
  return set;
}

}  // namespace sublab
