#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clssr {

// Everything measured for one channel draw under one action. Per-eavesdropper
// quantities are indexed like NodeGeometry::eve_pos; *_min() reduces each to
// its worst case across eavesdroppers.
struct SecuritySnapshot {
  double r_u = 0.0;             // user link rate, bit/s
  std::vector<double> r_e;      // eavesdropper link rates
  std::vector<double> r_sec;    // secrecy rates (r_u - r_e)^+
  double g_u = 0.0;             // user task distortion
  std::vector<double> g_e;      // eavesdropper task distortions
  std::vector<double> task_sec; // task security level per eavesdropper
  std::vector<double> phi;      // semantic bit efficiency per eavesdropper
  std::vector<double> omega;    // cross-layer secure rate per eavesdropper
  double omega_u = 0.0;         // min over eavesdroppers
  bool timely = false;

  double r_e_min() const;
  double r_sec_min() const;
  double g_e_min() const;
  double task_sec_min() const;
  double phi_min() const;
};

// One simulated task: its measurements plus the two events counted by the
// reliability metric. secure holds iff every eavesdropper's task security
// level is positive.
struct TaskRecord {
  SecuritySnapshot snapshot;
  bool secure = false;
  bool timely = false;
};

TaskRecord make_task_record(SecuritySnapshot snap);

// Wiretap secrecy rate (r_u - r_e)^+.
double security_rate(double r_u, double r_e);

struct TaskSecurityOptions {
  // Allow the r_sec == 0 branch where semantic noise alone denies the
  // eavesdropper. Cleared for physical-layer-only baselines.
  bool app_layer_security = true;
  // User threshold comparison g_u < eps; false relaxes it to g_u <= eps.
  bool strict_user = true;
};

// Task security level: positive iff the user reconstructs the task below the
// distortion threshold while the eavesdropper is denied either by the
// physical layer (positive secrecy rate) or by semantic noise keeping its
// distortion at or above the threshold. When positive the level equals the
// user's task fidelity 1 - g_u.
double task_security(double g_u, double g_e, double r_sec, double eps,
                     TaskSecurityOptions opts = {});

// Task fidelity earned per transmitted bit: g_s / (n * b).
double semantic_bit_efficiency(double g_s, int n, int b);

// Cross-layer semantic secure rate against one eavesdropper: efficiency times
// the secrecy rate when the physical layer leaks nothing, otherwise times the
// full link rate (the application layer is then the only line of defense).
double clssr(double phi, double r_sec, double r_u);

// Multi-eavesdropper rate: the minimum over per-eavesdropper rates.
double clssr_multi_eve(const std::vector<double>& omegas);

// True when n * b bits fit through a link of rate r_u within t_max seconds.
bool is_timely(int n, int b, double r_u, double t_max_s);

// Percentage of records that are simultaneously secure and timely.
double task_reliability(std::span<const TaskRecord> records);

std::string snapshot_csv_header();
std::string snapshot_csv_row(double tau, std::string_view scheme,
                             const SecuritySnapshot& snap);

// Shortest-round-trip decimal formatting used by every CSV/JSON writer so
// files are byte-identical across runs and worker counts.
std::string format_double(double v);

}  // namespace clssr
