#ifndef ROBORD_LINKS_HPP
#define ROBORD_LINKS_HPP

#include <string>

namespace robord {

/// Cumulative-link families: the latent-error distribution G, its density g,
/// and the quantile G^{-1}. Arguments may be +/-infinity; those sentinels map
/// to exact boundary values (cdf 0/1, pdf 0) rather than relying on overflow.
enum class LinkKind {
  Probit,   // standard normal
  Logit,    // standard logistic
  LogLog,   // Gumbel (max), right-skewed: G(u) = exp(-exp(-u))
  CLogLog,  // log-Weibull (min), left-skewed: G(u) = 1 - exp(-exp(u))
  Cauchit,  // standard Cauchy
};

double link_cdf(LinkKind kind, double u);
double link_pdf(LinkKind kind, double u);

/// 1 - G(u) with full relative precision in the upper tail.
double link_survival(LinkKind kind, double u);

/// Inverse of link_cdf. quantile(0) = -inf, quantile(1) = +inf.
/// Throws std::invalid_argument for q outside [0,1].
double link_quantile(LinkKind kind, double q);

/// log G(u) and log(1 - G(u)), stable deep into the tails (no underflow for
/// finite u except where the true value is below exp(-1e308)).
double link_log_cdf(LinkKind kind, double u);
double link_log_survival(LinkKind kind, double u);

/// log g(u), evaluated analytically.
double link_log_pdf(LinkKind kind, double u);

bool link_is_symmetric(LinkKind kind);

/// Lowercase names used in all configuration surfaces:
/// "probit" | "logit" | "loglog" | "cloglog" | "cauchit".
const char* link_name(LinkKind kind);
LinkKind link_from_name(const std::string& name);

}  // namespace robord

#endif  // ROBORD_LINKS_HPP
