#include "robord/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "robord/csv.hpp"

namespace robord {

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  std::sort(values.begin(), values.end());
  const double h = prob * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double w = h - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[lo + 1] * w;
}

ResidualReport generalized_residuals(const FitResult& fit,
                                     const Dataset& data) {
  data.validate();
  fit.params.validate();
  constexpr double inf = std::numeric_limits<double>::infinity();
  const int M = static_cast<int>(fit.params.n_categories());

  ResidualReport report;
  report.residuals.resize(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double eta = data.X.row(i).dot(fit.params.beta);
    const int y = data.y[i];
    const double a = (y == 1) ? -inf : fit.params.delta[y - 2] - eta;
    const double b = (y == M) ? inf : fit.params.delta[y - 1] - eta;
    const double p = std::max(link_cdf(fit.link, b) - link_cdf(fit.link, a),
                              kProbFloor);
    report.residuals[i] =
        (link_pdf(fit.link, a) - link_pdf(fit.link, b)) / p;
  }

  std::vector<double> sample(report.residuals.data(),
                             report.residuals.data() + report.residuals.size());
  report.lo95 = empirical_quantile(sample, 0.025);
  report.hi95 = empirical_quantile(sample, 0.975);
  report.lo99 = empirical_quantile(sample, 0.005);
  report.hi99 = empirical_quantile(sample, 0.995);
  for (Eigen::Index i = 0; i < report.residuals.size(); ++i) {
    if (report.residuals[i] < report.lo95 ||
        report.residuals[i] > report.hi95) {
      report.flagged.push_back(i);
    }
  }
  return report;
}

void ResidualReport::write_csv(std::ostream& os) const {
  os << "row,residual,lo95,hi95,lo99,hi99,flagged\n";
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    const bool is_flagged =
        std::binary_search(flagged.begin(), flagged.end(), i);
    os << i + 1 << ',' << format_double(residuals[i]) << ','
       << format_double(lo95) << ',' << format_double(hi95) << ','
       << format_double(lo99) << ',' << format_double(hi99) << ','
       << (is_flagged ? 1 : 0) << '\n';
  }
}

std::pair<double, double> params_distance(const Params& a, const Params& b) {
  if (a.beta.size() != b.beta.size() || a.delta.size() != b.delta.size()) {
    throw std::invalid_argument("params_distance: dimension mismatch");
  }
  const double coef =
      (a.beta - b.beta).squaredNorm() / static_cast<double>(a.beta.size());
  const double cutoff =
      (a.delta - b.delta).squaredNorm() / static_cast<double>(a.delta.size());
  return {coef, cutoff};
}

}  // namespace robord
