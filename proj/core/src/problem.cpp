#include "irm/problem.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace irm {
namespace {

// Sentinel used to detect output slots a callable never wrote.
double sentinel() {
  return std::bit_cast<double>(UINT64_C(0x7ff8dead00000001));
}

bool is_sentinel(double x) {
  return std::bit_cast<std::uint64_t>(x) == UINT64_C(0x7ff8dead00000001);
}

void probe_outputs(std::span<double> out, const std::string& what,
                   ValidationReport& rep) {
  int written = 0;
  bool finite = true;
  for (const double v : out) {
    if (is_sentinel(v)) break;
    ++written;
    finite = finite && std::isfinite(v);
  }
  if (written != static_cast<int>(out.size())) {
    rep.valid = false;
    rep.issues.push_back(what + ": wrote " + std::to_string(written) +
                         " of " + std::to_string(out.size()) +
                         " declared outputs (dimension mismatch)");
  } else if (!finite) {
    rep.warnings.push_back(what + ": non-finite output at zero probe point");
  }
}

}  // namespace

ValidationReport validate(const DynamicsProblem& p) {
  ValidationReport rep;
  if (!(p.tf > p.t0)) {
    rep.valid = false;
    rep.issues.push_back("horizon: tf must exceed t0");
  }
  if (p.n_f < 1) {
    rep.valid = false;
    rep.issues.push_back("dynamics: N_F must be at least 1");
  }
  if (!p.dynamics) {
    rep.valid = false;
    rep.issues.push_back("dynamics: callable missing");
    return rep;
  }

  const std::vector<double> xd(p.n_x, 0.0), x(p.n_x, 0.0), u(p.n_u, 0.0);
  {
    std::vector<double> out(p.n_f, sentinel());
    p.dynamics(xd, x, u, p.t0, out);
    probe_outputs(out, "F", rep);
  }
  if (p.n_g > 0) {
    if (!p.path) {
      rep.valid = false;
      rep.issues.push_back("path: callable missing with N_g > 0");
    } else {
      std::vector<double> out(p.n_g, sentinel());
      p.path(xd, x, u, p.t0, out);
      probe_outputs(out, "G", rep);
    }
  }
  if (p.n_e > 0) {
    if (!p.boundary_eq) {
      rep.valid = false;
      rep.issues.push_back("boundary_eq: callable missing with N_E > 0");
    } else {
      std::vector<double> out(p.n_e, sentinel());
      p.boundary_eq(x, x, p.t0, p.tf, out);
      probe_outputs(out, "Psi_E", rep);
    }
  }
  if (p.n_i > 0) {
    if (!p.boundary_ineq) {
      rep.valid = false;
      rep.issues.push_back("boundary_ineq: callable missing with N_I > 0");
    } else {
      std::vector<double> out(p.n_i, sentinel());
      p.boundary_ineq(x, x, p.t0, p.tf, out);
      probe_outputs(out, "Psi_I", rep);
    }
  }
  return rep;
}

}  // namespace irm
