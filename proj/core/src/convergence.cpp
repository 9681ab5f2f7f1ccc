#include "irm/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace irm {

OrderFit fit_order(const std::vector<ConvergenceRow>& rows,
                   const std::string& scheme, double horizon, int fit_floor) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.scheme != scheme || r.status != "converged" || r.n < fit_floor) {
      continue;
    }
    if (!(r.eps_r > 0.0)) continue;
    xs.push_back(std::log(horizon / r.n));
    ys.push_back(std::log(r.eps_r));
  }
  OrderFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) return fit;
  const double n = fit.points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  fit.p = vxy / vxx;
  fit.log_k = (sy - fit.p * sx) / n;
  fit.r_squared = vyy > 0.0 ? vxy * vxy / (vxx * vyy) : 1.0;
  return fit;
}

void normalize_wall_times(std::vector<ConvergenceRow>& rows) {
  double max_t = 0.0;
  for (const auto& r : rows) max_t = std::max(max_t, r.wall_time_s);
  for (auto& r : rows) {
    r.wall_time_norm = max_t > 0.0 ? r.wall_time_s / max_t : 0.0;
  }
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "scheme,N,eps_r,eps_q,wall_time_s,wall_time_norm,iterations,status\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g,%.17g,%d,%s\n",
                  r.scheme.c_str(), r.n, r.eps_r, r.eps_q, r.wall_time_s,
                  r.wall_time_norm, r.iterations, r.status.c_str());
    out << buf;
  }
}

std::vector<ConvergenceRow> read_convergence_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ConvergenceRow r;
    std::string field;
    std::getline(ss, r.scheme, ',');
    std::getline(ss, field, ',');
    r.n = std::stoi(field);
    std::getline(ss, field, ',');
    r.eps_r = std::stod(field);
    std::getline(ss, field, ',');
    r.eps_q = std::stod(field);
    std::getline(ss, field, ',');
    r.wall_time_s = std::stod(field);
    std::getline(ss, field, ',');
    r.wall_time_norm = std::stod(field);
    std::getline(ss, field, ',');
    r.iterations = std::stoi(field);
    std::getline(ss, r.status, ',');
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace irm
