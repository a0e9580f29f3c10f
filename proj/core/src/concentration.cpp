#include "fedsim/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fedsim/errors.hpp"
#include "fedsim/parallel.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {

double quantile95_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t idx = std::min(
      n - 1, static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n))) - 1);
  return values[idx];
}

double fit_loglog_slope(std::span<const std::size_t> xs,
                        std::span<const double> ys) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(static_cast<double>(xs[i]));
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(static_cast<double>(xs[i])) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void require_increasing(std::span<const std::size_t> values, const char* what) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] <= values[i - 1])
      throw DimensionError(std::string(what) + " must be strictly increasing");
}

/// || U^T Sigma V - U^T V ||_2 for one batch of b samples, computed through
/// the b x d1 and b x d2 projections so Sigma never materializes.
double projected_gram_deviation_impl(const Matrix& u, const Matrix& v,
                                     std::size_t d, std::size_t b,
                                     rng::Stream& stream) {
  const Matrix x = rng::gaussian_matrix(stream, b, d);
  const Matrix xu = matmul(x, u);
  const Matrix xv = matmul(x, v);
  Matrix dev = scale(tmatmul(xu, xv), 1.0 / static_cast<double>(b));
  add_scaled(dev, -1.0, tmatmul(u, v));
  return spectral_norm(dev);
}

}  // namespace

double projected_gram_deviation(const Matrix& u, const Matrix& v, std::size_t b,
                                std::uint64_t stream_key) {
  if (u.rows() != v.rows())
    throw DimensionError("projected_gram_deviation: U and V row counts differ");
  if (b < 1) throw DimensionError("projected_gram_deviation: need b >= 1");
  rng::Stream stream(stream_key);
  return projected_gram_deviation_impl(u, v, u.rows(), b, stream);
}

DeviationCurve gram_deviation_experiment(std::size_t d, std::size_t d1,
                                         std::size_t d2,
                                         std::span<const std::size_t> b_values,
                                         std::size_t trials, std::uint64_t seed) {
  if (trials < 30) throw DimensionError("gram_deviation_experiment: need trials >= 30");
  require_increasing(b_values, "b_values");

  rng::Stream u_stream(rng::make_key(seed, rng::Tag::conc_projection_u, 0));
  rng::Stream v_stream(rng::make_key(seed, rng::Tag::conc_projection_v, 0));
  const Matrix u = rng::gaussian_matrix(u_stream, d, d1);
  const Matrix v = rng::gaussian_matrix(v_stream, d, d2);

  DeviationCurve curve;
  curve.sample_sizes.assign(b_values.begin(), b_values.end());
  curve.mean_deviation.resize(b_values.size());
  curve.quantile95.resize(b_values.size());
  for (std::size_t bi = 0; bi < b_values.size(); ++bi) {
    std::vector<double> devs(trials);
    parallel_for(trials, [&](std::size_t trial) {
      rng::Stream stream(rng::make_key(seed, rng::Tag::conc_samples, bi, trial, 0));
      devs[trial] = projected_gram_deviation_impl(u, v, d, b_values[bi], stream);
    });
    curve.mean_deviation[bi] =
        std::accumulate(devs.begin(), devs.end(), 0.0) / static_cast<double>(trials);
    curve.quantile95[bi] = quantile95_of(devs);
  }
  curve.fitted_slope = fit_loglog_slope(curve.sample_sizes, curve.mean_deviation);
  return curve;
}

DeviationCurve averaged_gram_deviation_experiment(
    std::size_t d, std::size_t d1, std::size_t d2,
    std::span<const std::size_t> m_values, std::size_t b, std::size_t trials,
    std::uint64_t seed) {
  if (trials < 30)
    throw DimensionError("averaged_gram_deviation_experiment: need trials >= 30");
  require_increasing(m_values, "M_values");

  const std::size_t max_m = m_values.back();
  std::vector<Matrix> us, vs;
  us.reserve(max_m);
  vs.reserve(max_m);
  for (std::size_t i = 0; i < max_m; ++i) {
    rng::Stream u_stream(rng::make_key(seed, rng::Tag::conc_projection_u, i));
    rng::Stream v_stream(rng::make_key(seed, rng::Tag::conc_projection_v, i));
    us.push_back(rng::gaussian_matrix(u_stream, d, d1));
    vs.push_back(rng::gaussian_matrix(v_stream, d, d2));
  }

  DeviationCurve curve;
  curve.sample_sizes.assign(m_values.begin(), m_values.end());
  curve.mean_deviation.resize(m_values.size());
  curve.quantile95.resize(m_values.size());
  for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
    const std::size_t m = m_values[mi];
    std::vector<double> devs(trials);
    parallel_for(trials, [&](std::size_t trial) {
      Matrix averaged(d1, d2);
      for (std::size_t i = 0; i < m; ++i) {
        rng::Stream stream(rng::make_key(seed, rng::Tag::conc_samples, mi, trial, i));
        const Matrix x = rng::gaussian_matrix(stream, b, d);
        const Matrix xu = matmul(x, us[i]);
        const Matrix xv = matmul(x, vs[i]);
        Matrix dev = scale(tmatmul(xu, xv), 1.0 / static_cast<double>(b));
        add_scaled(dev, -1.0, tmatmul(us[i], vs[i]));
        add_scaled(averaged, 1.0 / static_cast<double>(m), dev);
      }
      devs[trial] = spectral_norm(averaged);
    });
    curve.mean_deviation[mi] =
        std::accumulate(devs.begin(), devs.end(), 0.0) / static_cast<double>(trials);
    curve.quantile95[mi] = quantile95_of(devs);
  }
  curve.fitted_slope = fit_loglog_slope(curve.sample_sizes, curve.mean_deviation);
  return curve;
}

double head_sampling_event_rate(std::span<const Vector> heads, std::size_t m,
                                double alpha, std::size_t rounds,
                                std::size_t trials, std::uint64_t seed) {
  const std::size_t num_clients = heads.size();
  if (m < 1 || m > num_clients)
    throw InvalidSampleSizeError("head_sampling_event_rate: need 1 <= m <= M");
  const std::size_t k = heads.front().dim();

  Vector w_bar(k);
  Matrix second_moment(k, k);
  double l_max = 0.0;
  const double inv_mm = 1.0 / static_cast<double>(num_clients);
  for (const Vector& w : heads) {
    add_scaled(w_bar, inv_mm, w);
    rank_one_update(second_moment, inv_mm, w, w);
    l_max = std::max(l_max, norm(w));
  }
  const double l3 = l_max * l_max * l_max;
  const double mean_bound = 4.0 * alpha * alpha * l3;
  const double gram_bound = mean_bound * l_max;

  std::vector<char> ok(trials, 1);
  parallel_for(trials, [&](std::size_t trial) {
    rng::Stream stream(rng::make_key(seed, rng::Tag::head_event, trial));
    std::vector<std::size_t> idx(num_clients);
    for (std::size_t t = 0; t < rounds && ok[trial]; ++t) {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t swap_at =
            j + static_cast<std::size_t>(stream.next_below(num_clients - j));
        std::swap(idx[j], idx[swap_at]);
      }
      std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));

      Vector mean(k);
      Matrix moment(k, k);
      const double inv_m = 1.0 / static_cast<double>(m);
      for (std::size_t j = 0; j < m; ++j) {
        add_scaled(mean, inv_m, heads[idx[j]]);
        rank_one_update(moment, inv_m, heads[idx[j]], heads[idx[j]]);
      }
      add_scaled(mean, -1.0, w_bar);
      add_scaled(moment, -1.0, second_moment);
      if (norm(mean) > mean_bound || spectral_norm(moment) > gram_bound)
        ok[trial] = 0;
    }
  });

  std::size_t holds = 0;
  for (char c : ok) holds += static_cast<std::size_t>(c);
  return static_cast<double>(holds) / static_cast<double>(trials);
}

std::size_t head_sampling_threshold(const DiversityStats& stats, std::size_t k,
                                    std::size_t num_clients, double alpha,
                                    std::size_t rounds) {
  const double l = stats.l_max;
  const double ratio_gamma = (stats.gamma / l) * (stats.gamma / l);
  const double ratio_h = std::pow(stats.h / l, 4.0);
  const double raw = 20.0 * (ratio_gamma + ratio_h) /
                     std::pow(alpha * l, 4.0) *
                     std::log(static_cast<double>(k) * static_cast<double>(rounds));
  if (!std::isfinite(raw) || raw >= static_cast<double>(num_clients))
    return num_clients;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw)));
}

}  // namespace fedsim
