#pragma once

// Univariate distribution helpers shared by the simulation designs and the
// Monte-Carlo copula oracle.

namespace tailmax {

/// Quantile of the standard Student-t distribution with `nu` degrees of freedom.
double student_t_quantile(double nu, double probability);

/// Upper tail probability Pr{T > x} for T ~ t_nu, accurate far into the tail.
double student_t_survival(double nu, double x);

/// Standard normal quantile.
double normal_quantile(double probability);

}  // namespace tailmax
