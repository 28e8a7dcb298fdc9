#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ga2d {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Integer cavity coordinate on the square lattice (lattice units).
struct Site {
    int x = 0;
    int y = 0;

    friend constexpr auto operator<=>(const Site&, const Site&) = default;
    friend constexpr Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }
};

inline std::string to_string(Site s) {
    return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")";
}

/// A configuration violates a structural invariant (bad lattice, shared cavity, ...).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A resource guard tripped (e.g. dense oracle asked for a lattice that is too large).
class GuardError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain (non-subradiant atom, bad subset pair, ...).
class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Brillouin-zone quadrature hit a pole of the resolvent.
class SingularityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file could not be read, written or parsed.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ga2d
