#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctds/formula.hpp"

namespace ctds {

/// A point (s, ln a) of the extended phase space plus the analog clock.
/// Auxiliary weights are kept as b_m = ln a_m; a_m(0) = 1 is b_m = 0.
struct ContinuousState {
  std::vector<double> s;
  std::vector<double> log_a;
  double t = 0.0;
};

struct DynamicsParams {
  double log_a_cap = 600.0;
};

enum class FieldStatus { Ok, Overflow };

/// K_m = 2^-k_m prod_i (1 - c_mi s_i), with k_m the clause's own length.
double constraint_value(const CnfFormula& formula, std::span<const double> s, std::size_t m);

/// K_mi: the product over the clause's other variables, formed by omission.
double constraint_partial(const CnfFormula& formula, std::span<const double> s, std::size_t m, std::size_t i);

/// E(s) = sum_m K_m^2.
double energy_E(const CnfFormula& formula, std::span<const double> s);

/// V(s, a) = sum_m a_m K_m^2. Throws Error(Overflow) when a term is not finite.
double energy_V(const CnfFormula& formula, std::span<const double> s, std::span<const double> log_a,
                const DynamicsParams& params = {});

/// The vector field:
///   ds_i/dt = sum_m 2 a_m c_mi K_mi K_m
///   db_m/dt = K_m            (b_m = ln a_m)
/// Returns Overflow if some b_m exceeds the cap or a force term is not finite;
/// the outputs are then unspecified.
FieldStatus rhs(const CnfFormula& formula, std::span<const double> s, std::span<const double> log_a,
                std::span<double> ds_dt, std::span<double> dlog_a_dt, const DynamicsParams& params = {});

/// sigma = (k-1)/(k+1) for uniform clause length k.
double attraction_sigma(std::size_t k);

/// True iff s lies in the orthant of s_star and |s|^2 >= N - 1 + sigma^2.
/// Throws MixedClauseLengths unless every clause has the same length.
bool guaranteed_basin_test(const CnfFormula& formula, std::span<const double> s, std::span<const std::int8_t> s_star);

}  // namespace ctds
