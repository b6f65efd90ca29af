#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fwdflat/dtsystem.hpp"
#include "fwdflat/poly.hpp"
#include "fwdflat/scalar.hpp"

namespace gen {

/// Random polynomial with at most `terms` terms and total degree <= `degree`.
fwdflat::Poly poly(std::mt19937_64& rng, const std::vector<std::string>& vars, int terms, int degree);
/// Random nonzero rational function with polynomial parts from poly().
fwdflat::Scalar scalar(std::mt19937_64& rng, const std::vector<std::string>& vars, int terms, int degree);

std::vector<std::string> names(const std::string& prefix, int count);

/// Random polynomial system with states x# and inputs u#; nullopt when it is
/// not submersive or has no adapted chart found by triangular inversion.
std::optional<fwdflat::DiscreteSystem> random_system(std::mt19937_64& rng, std::size_t n, std::size_t m);

/// Flat by construction: a perturbed triangular (chain) system composed with
/// a random invertible rational state transformation and a random invertible
/// input transformation, all fixing the origin. Retries until the result has
/// an adapted chart.
fwdflat::DiscreteSystem random_flat_system(std::mt19937_64& rng, const std::string& name);

}  // namespace gen
