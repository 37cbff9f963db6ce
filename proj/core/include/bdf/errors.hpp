#pragma once

#include <stdexcept>
#include <string>

namespace bdf {

// Configuration rejected before any computation started (bad grid, bad flag, ...).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Two objects built on different lattices were combined.
class LatticeMismatch : public std::logic_error {
public:
  explicit LatticeMismatch(const std::string& what) : std::logic_error(what) {}
};

// The mean-field operator developed an eigenvalue inside the protective gap,
// so the negative spectral projector is no longer well conditioned.
class GapCollapse : public std::runtime_error {
public:
  GapCollapse(double min_abs_eig, double gap_tol)
      : std::runtime_error("spectral gap collapsed: min|eig| = " + std::to_string(min_abs_eig) +
                           " < gap_tol = " + std::to_string(gap_tol)),
        min_abs_eig(min_abs_eig), gap_tol(gap_tol) {}
  double min_abs_eig;
  double gap_tol;
};

// Binary snapshot could not be read back (bad magic, version, or size).
class SnapshotError : public std::runtime_error {
public:
  explicit SnapshotError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bdf
