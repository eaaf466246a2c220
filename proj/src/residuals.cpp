#include "swarmopt/residuals.hpp"

#include <cmath>
#include <sstream>

namespace swarm {

namespace {

double safe_sqrt(double v) { return v < 0 ? -1.0 : std::sqrt(v); }

}  // namespace

double ResidualReport::primal_threshold(int key, double eps_abs,
                                        double eps_rel) const {
  return std::sqrt(dims[key]) * eps_abs + eps_rel * rel_primal[key];
}

double ResidualReport::dual_threshold(int key, double eps_abs,
                                      double eps_rel) const {
  return std::sqrt(dims[key]) * eps_abs + eps_rel * rel_dual[key];
}

ResidualReport assemble_residuals(
    const std::vector<ResidualComponents>& components,
    const Penalties& penalties, double za_change_sq, double za_norm_sq,
    double sa_change_sq, double sa_norm_sq,
    const std::array<double, kResidualKeys>& dims, long iteration) {
  ResidualReport rep;
  rep.iteration = iteration;
  rep.dims = dims;
  rep.complete = !components.empty();

  double pu = 0, px = 0, pt = 0, pxa = 0, pta = 0;
  double du = 0, dx = 0, dt = 0;
  double nu = 0, nut = 0, nx = 0, nxt = 0, nt = 0, ntt = 0;
  double nxa = 0, nta = 0;
  double dzeta = 0, dlambda = 0, dnu = 0, dy = 0, deta = 0;

  for (const ResidualComponents& c : components) {
    if (c.primal_u < 0 || c.delta_u_tilde < 0) rep.complete = false;
    pu += std::max(c.primal_u, 0.0);
    px += std::max(c.primal_x, 0.0);
    pt += std::max(c.primal_t, 0.0);
    pxa += std::max(c.primal_xa, 0.0);
    pta += std::max(c.primal_ta, 0.0);
    du += std::max(c.delta_u_tilde, 0.0);
    dx += std::max(c.delta_x_tilde, 0.0);
    dt += std::max(c.delta_t_tilde, 0.0);
    nu += c.norm_u;
    nut += c.norm_u_tilde;
    nx += c.norm_x;
    nxt += c.norm_x_tilde;
    nt += c.norm_t;
    ntt += c.norm_t_tilde;
    nxa += c.norm_xa;
    nta += c.norm_ta;
    dzeta += c.norm_zeta;
    dlambda += c.norm_lambda;
    dnu += c.norm_nu;
    dy += c.norm_y;
    deta += c.norm_eta;
  }

  rep.primal[kU] = safe_sqrt(pu);
  rep.primal[kX] = safe_sqrt(px);
  rep.primal[kT] = safe_sqrt(pt);
  rep.primal[kXa] = safe_sqrt(pxa);
  rep.primal[kTa] = safe_sqrt(pta);

  rep.dual[kU] = penalties.control * safe_sqrt(du);
  rep.dual[kX] = penalties.state * safe_sqrt(dx);
  rep.dual[kT] = penalties.time * safe_sqrt(dt);
  rep.dual[kXa] = za_change_sq < 0
                      ? -1.0
                      : penalties.consensus_state * std::sqrt(za_change_sq);
  rep.dual[kTa] = sa_change_sq < 0
                      ? -1.0
                      : penalties.consensus_time * std::sqrt(sa_change_sq);
  if (za_change_sq < 0 || sa_change_sq < 0) rep.complete = false;

  rep.rel_primal[kU] = std::sqrt(std::max(nu, nut));
  rep.rel_primal[kX] = std::sqrt(std::max(nx, nxt));
  rep.rel_primal[kT] = std::sqrt(std::max(nt, ntt));
  rep.rel_primal[kXa] = std::sqrt(std::max(nxa, za_norm_sq));
  rep.rel_primal[kTa] = std::sqrt(std::max(nta, sa_norm_sq));

  rep.rel_dual[kU] = std::sqrt(dzeta);
  rep.rel_dual[kX] = std::sqrt(dlambda);
  rep.rel_dual[kT] = std::sqrt(dnu);
  rep.rel_dual[kXa] = std::sqrt(dy);
  rep.rel_dual[kTa] = std::sqrt(deta);
  return rep;
}

bool check_stop(const ResidualReport& report, double eps_abs, double eps_rel) {
  if (!report.complete) return false;
  for (int key = 0; key < kResidualKeys; ++key) {
    if (report.primal[key] < 0 || report.dual[key] < 0) return false;
    if (report.primal[key] > report.primal_threshold(key, eps_abs, eps_rel))
      return false;
    if (report.dual[key] > report.dual_threshold(key, eps_abs, eps_rel))
      return false;
  }
  return true;
}

std::string residual_csv_header() {
  static const char* names[kResidualKeys] = {"u", "x", "t", "xa", "ta"};
  std::ostringstream os;
  os << "commit";
  for (const char* n : names)
    os << ",rp_" << n << ",rp_" << n << "_thr"
       << ",rd_" << n << ",rd_" << n << "_thr";
  os << ",stop";
  return os.str();
}

std::string residual_csv_row(const ResidualReport& r, double eps_abs,
                             double eps_rel) {
  std::ostringstream os;
  os.precision(9);
  os << r.iteration;
  for (int key = 0; key < kResidualKeys; ++key)
    os << ',' << r.primal[key] << ','
       << r.primal_threshold(key, eps_abs, eps_rel) << ',' << r.dual[key]
       << ',' << r.dual_threshold(key, eps_abs, eps_rel);
  os << ',' << (check_stop(r, eps_abs, eps_rel) ? 1 : 0);
  return os.str();
}

}  // namespace swarm
