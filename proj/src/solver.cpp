#include "immsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "immsim/errors.hpp"

namespace immsim {

namespace {

double clamped_conductance(double resistance, const SolverOptions& opts) {
  return 1.0 / std::max(resistance, opts.min_resistance);
}

}  // namespace

Network build_network(const CrossbarState& cb, const DriveConfig& drive,
                      const SolverOptions& opts) {
  const std::size_t m = cb.rows();
  const std::size_t n = cb.cols();
  if (drive.row_drives.size() != m || drive.col_drives.size() != n ||
      drive.gate_voltages.size() != cb.gate_line_count())
    throw ConfigError("drive configuration does not match the crossbar dimensions");

  NodeLayout layout{m, n};
  Network net;
  net.node_count = layout.count();
  net.boundary.assign(net.node_count, std::nullopt);
  net.leak.assign(net.node_count, 0.0);
  net.gate_on.assign(m * n, false);

  bool any_driven = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (drive.row_drives[i].is_driven()) {
      net.boundary[layout.row_node(i)] = drive.row_drives[i].voltage();
      any_driven = true;
    } else {
      net.leak[layout.row_node(i)] = opts.leak_conductance;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (drive.col_drives[j].is_driven()) {
      net.boundary[layout.col_node(j)] = drive.col_drives[j].voltage();
      any_driven = true;
    } else {
      net.leak[layout.col_node(j)] = opts.leak_conductance;
    }
  }

  bool any_gate_open = false;
  net.branches.reserve(2 * m * n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const CellAddress a{r, c};
      const DeviceState& dev = cb.cell(a);
      const double v_gate = drive.gate_voltages[cb.gate_line(a)];
      const bool on = cb.transistor_params().conducts(v_gate);
      net.gate_on[r * n + c] = on;
      any_gate_open = any_gate_open || on;

      Branch mem;
      mem.node_a = layout.line_node(cb.electrode_line(a));
      mem.node_b = layout.cell_node(a);
      mem.conductance = clamped_conductance(dev.resistance(), opts);
      mem.cell = a;
      mem.kind = BranchKind::Memristor;
      net.branches.push_back(mem);

      Branch fet;
      fet.node_a = layout.cell_node(a);
      fet.node_b = layout.line_node(cb.source_line(a));
      fet.conductance = clamped_conductance(cb.transistor_params().resistance(v_gate), opts);
      fet.cell = a;
      fet.kind = BranchKind::Transistor;
      net.branches.push_back(fet);
    }
  }

  if (any_gate_open && !any_driven)
    throw ConfigError("drive opens gates but drives no line; the network would float");
  return net;
}

std::vector<double> solve_dc(const Network& net, const SolverOptions& opts) {
  const std::size_t N = net.node_count;
  if (net.boundary.size() != N || net.leak.size() != N)
    throw ConfigError("network boundary/leak vectors do not match node count");

  // Map unknown nodes to consecutive indices.
  std::vector<std::ptrdiff_t> unknown_index(N, -1);
  std::size_t n_unknown = 0;
  bool any_boundary = false;
  for (std::size_t i = 0; i < N; ++i) {
    if (net.boundary[i].has_value()) any_boundary = true;
    else unknown_index[i] = static_cast<std::ptrdiff_t>(n_unknown++);
  }
  double max_leak = 0.0;
  for (double g : net.leak) max_leak = std::max(max_leak, g);
  if (!any_boundary && max_leak <= 0.0)
    throw SolverError("network is entirely floating and leak regularization is disabled");

  std::vector<double> volts(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    if (net.boundary[i].has_value()) volts[i] = *net.boundary[i];
  if (n_unknown == 0) return volts;

  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * net.branches.size() + n_unknown);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_unknown));

  auto boundary_voltage = [&](std::size_t node) -> double {
    return node == kGroundNode ? 0.0 : *net.boundary[node];
  };
  auto is_known = [&](std::size_t node) {
    return node == kGroundNode || net.boundary[node].has_value();
  };

  for (const Branch& b : net.branches) {
    if (!(b.conductance > 0.0) || !std::isfinite(b.conductance))
      throw ConfigError("branch conductance must be positive and finite");
    const bool a_known = is_known(b.node_a);
    const bool b_known = is_known(b.node_b);
    if (a_known && b_known) continue;
    if (!a_known) {
      const auto ia = unknown_index[b.node_a];
      triplets.emplace_back(ia, ia, b.conductance);
      if (b_known) rhs[ia] += b.conductance * boundary_voltage(b.node_b);
      else triplets.emplace_back(ia, unknown_index[b.node_b], -b.conductance);
    }
    if (!b_known) {
      const auto ib = unknown_index[b.node_b];
      triplets.emplace_back(ib, ib, b.conductance);
      if (a_known) rhs[ib] += b.conductance * boundary_voltage(b.node_a);
      else triplets.emplace_back(ib, unknown_index[b.node_a], -b.conductance);
    }
  }
  for (std::size_t i = 0; i < N; ++i)
    if (unknown_index[i] >= 0 && net.leak[i] > 0.0)
      triplets.emplace_back(unknown_index[i], unknown_index[i], net.leak[i]);

  Sparse A(static_cast<Eigen::Index>(n_unknown), static_cast<Eigen::Index>(n_unknown));
  A.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SimplicialLDLT<Sparse> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw SolverError("factorization of the nodal system failed");
  Eigen::VectorXd x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success) throw SolverError("nodal solve failed");

  // The residual of A x - rhs is the KCL defect at each unknown node; refine
  // until it is negligible against the injected currents.
  const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-30);
  const double tol = opts.residual_rel_tol * scale;
  Eigen::VectorXd residual = rhs - A * x;
  std::size_t pass = 0;
  while (residual.cwiseAbs().maxCoeff() > tol) {
    if (pass++ >= opts.max_refinements)
      throw SolverError("nodal solve did not reach the requested residual");
    x += ldlt.solve(residual);
    residual = rhs - A * x;
  }

  for (std::size_t i = 0; i < N; ++i)
    if (unknown_index[i] >= 0) volts[i] = x[unknown_index[i]];
  return volts;
}

namespace {

PulseInterval sample_interval(const CrossbarState& cb, const Network& net,
                              const std::vector<double>& volts) {
  const std::size_t m = cb.rows();
  const std::size_t n = cb.cols();
  PulseInterval interval;
  interval.node_voltages = volts;
  interval.devices.resize(m * n);
  // Branches are ordered two per cell, memristor first.
  for (std::size_t i = 0; i < m * n; ++i) {
    const Branch& mem = net.branches[2 * i];
    const Branch& fet = net.branches[2 * i + 1];
    DeviceSample& s = interval.devices[i];
    s.v_memristor = volts[mem.node_a] - volts[mem.node_b];
    s.i_memristor = mem.conductance * s.v_memristor;
    s.v_transistor = volts[fet.node_a] - volts[fet.node_b];
    s.i_transistor = fet.conductance * s.v_transistor;
  }
  return interval;
}

}  // namespace

PulseResult run_pulse(CrossbarState& cb, const DriveConfig& drive, const SolverOptions& opts) {
  const std::size_t m = cb.rows();
  const std::size_t n = cb.cols();
  const NodeLayout layout{m, n};
  const std::size_t iteration_cap = m * n;

  Network net = build_network(cb, drive, opts);
  PulseResult result;
  result.rows = m;
  result.cols = n;
  result.participants.assign(m * n, true);

  std::vector<bool> switched(m * n, false);
  for (std::size_t iter = 0;; ++iter) {
    const std::vector<double> volts = solve_dc(net, opts);
    result.intervals.push_back(sample_interval(cb, net, volts));

    std::vector<std::pair<CellAddress, Transition>> pending;
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const CellAddress a{r, c};
        const double v = volts[layout.line_node(cb.electrode_line(a))] - volts[layout.cell_node(a)];
        const Transition t = switching_decision(cb.cell(a), v, cb.memristor_params());
        if (t == Transition::None) continue;
        if (switched[r * n + c])
          throw OscillationError("cell (" + to_string(a) +
                                 ") requested a second transition within one pulse");
        pending.emplace_back(a, t);
      }
    }
    if (pending.empty()) break;
    if (iter >= iteration_cap)
      throw OscillationError("within-pulse fixed point exceeded " +
                             std::to_string(iteration_cap) + " iterations");

    // Jacobi-style: every pending transition applies at once, then re-solve.
    for (const auto& [a, t] : pending) {
      cb.apply_transition(a, t);
      switched[a.row * n + a.col] = true;
      result.switching_events.push_back({a, t, iter});
      Branch& mem = net.branches[2 * (a.row * n + a.col)];
      mem.conductance = 1.0 / std::max(cb.cell(a).resistance(), opts.min_resistance);
    }
  }

  const std::size_t k = result.intervals.size();
  if (k == 1) {
    result.intervals[0].fraction = 1.0;
  } else {
    const double t_switch = cb.memristor_params().t_switch_frac;
    result.intervals[0].fraction = t_switch;
    for (std::size_t i = 1; i < k; ++i)
      result.intervals[i].fraction = (1.0 - t_switch) / static_cast<double>(k - 1);
  }
  result.final_states = cb.logic_grid();
  return result;
}

}  // namespace immsim
