#include "clssr/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace clssr {
namespace {

double min_of(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw std::invalid_argument(what);
  return *std::min_element(v.begin(), v.end());
}

}  // namespace

double SecuritySnapshot::r_e_min() const {
  return min_of(r_e, "snapshot has no eavesdropper rates");
}
double SecuritySnapshot::r_sec_min() const {
  return min_of(r_sec, "snapshot has no secrecy rates");
}
double SecuritySnapshot::g_e_min() const {
  return min_of(g_e, "snapshot has no eavesdropper distortions");
}
double SecuritySnapshot::task_sec_min() const {
  return min_of(task_sec, "snapshot has no task security levels");
}
double SecuritySnapshot::phi_min() const {
  return min_of(phi, "snapshot has no bit efficiencies");
}

TaskRecord make_task_record(SecuritySnapshot snap) {
  TaskRecord rec;
  rec.secure = snap.task_sec_min() > 0.0;
  rec.timely = snap.timely;
  rec.snapshot = std::move(snap);
  return rec;
}

double security_rate(double r_u, double r_e) {
  return std::max(0.0, r_u - r_e);
}

double task_security(double g_u, double g_e, double r_sec, double eps,
                     TaskSecurityOptions opts) {
  const bool user_ok = opts.strict_user ? g_u < eps : g_u <= eps;
  const bool eve_denied =
      r_sec > 0.0 ||
      (opts.app_layer_security && r_sec == 0.0 && g_e >= eps);
  return (user_ok && eve_denied) ? 1.0 - g_u : 0.0;
}

double semantic_bit_efficiency(double g_s, int n, int b) {
  if (n <= 0 || b <= 0)
    throw std::invalid_argument("message dimensions must be positive");
  return g_s / (static_cast<double>(n) * b);
}

double clssr(double phi, double r_sec, double r_u) {
  return phi * (r_sec > 0.0 ? r_sec : r_u);
}

double clssr_multi_eve(const std::vector<double>& omegas) {
  return min_of(omegas, "no per-eavesdropper rates given");
}

bool is_timely(int n, int b, double r_u, double t_max_s) {
  if (!(r_u > 0.0)) return false;
  return static_cast<double>(n) * b / r_u <= t_max_s;
}

double task_reliability(std::span<const TaskRecord> records) {
  if (records.empty())
    throw std::invalid_argument("reliability of an empty record set");
  std::size_t good = 0;
  for (const auto& rec : records)
    if (rec.secure && rec.timely) ++good;
  return 100.0 * static_cast<double>(good) /
         static_cast<double>(records.size());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string snapshot_csv_header() {
  return "tau,scheme,r_u,r_e_min,r_sec_min,g_u,g_e_min,task_sec_min,phi_min,"
         "omega_u,timely";
}

std::string snapshot_csv_row(double tau, std::string_view scheme,
                             const SecuritySnapshot& snap) {
  std::string row = format_double(tau);
  row += ',';
  row += scheme;
  for (const double v : {snap.r_u, snap.r_e_min(), snap.r_sec_min(), snap.g_u,
                         snap.g_e_min(), snap.task_sec_min(), snap.phi_min(),
                         snap.omega_u}) {
    row += ',';
    row += format_double(v);
  }
  row += snap.timely ? ",1" : ",0";
  return row;
}

}  // namespace clssr
