// SPDX-License-Identifier: Apache-2.0
#include "ftprep/circuit.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace ftprep {

using nlohmann::json;

GateOp GateOp::unitary1(int target, const Mat2& u) {
  GateOp op;
  op.kind = Kind::kUnitary1;
  op.targets[0] = target;
  op.u2 = u;
  return op;
}

GateOp GateOp::unitary2(int a, int b, const Mat4& u) {
  GateOp op;
  op.kind = Kind::kUnitary2;
  op.targets = {a, b};
  op.u4 = u;
  return op;
}

GateOp GateOp::measure(int target, int bit) {
  GateOp op;
  op.kind = Kind::kMeasure;
  op.targets[0] = target;
  op.bit = bit;
  return op;
}

GateOp GateOp::reset(int target) {
  GateOp op;
  op.kind = Kind::kReset;
  op.targets[0] = target;
  return op;
}

GateOp GateOp::controlled_pauli(int target, PauliError pauli, ParityCond cond) {
  GateOp op;
  op.kind = Kind::kControlledPauli;
  op.targets[0] = target;
  op.pauli = pauli;
  op.cond = std::move(cond);
  return op;
}

CircuitStats stats(const Circuit& c) {
  CircuitStats s;
  s.qubits = c.num_qubits;
  s.depth = static_cast<int>(c.steps.size());
  s.area = s.qubits * s.depth;
  for (const TimeStep& step : c.steps) s.gate_ops += static_cast<int>(step.ops.size());
  return s;
}

std::vector<std::string> validate(const Circuit& c) {
  std::vector<std::string> out;
  std::vector<bool> bit_written(static_cast<std::size_t>(std::max(0, c.classical_bits)), false);

  auto check_bits_readable = [&](const ParityCond& cond, int step_idx, const char* what) {
    for (int b : cond.bits) {
      if (b < 0 || b >= c.classical_bits) {
        out.push_back("step " + std::to_string(step_idx) + ": " + what + " reads bit " + std::to_string(b) +
                      " outside [0, " + std::to_string(c.classical_bits) + ")");
      } else if (!bit_written[static_cast<std::size_t>(b)]) {
        out.push_back("step " + std::to_string(step_idx) + ": " + what + " reads unwritten bit " +
                      std::to_string(b));
      }
    }
  };

  for (int si = 0; si < static_cast<int>(c.steps.size()); ++si) {
    const TimeStep& step = c.steps[si];
    if (step.ops.empty()) out.push_back("step " + std::to_string(si) + ": empty time step");
    std::set<int> used;
    for (const GateOp& op : step.ops) {
      for (int t = 0; t < op.num_targets(); ++t) {
        const int q = op.targets[static_cast<std::size_t>(t)];
        if (q < 0 || q >= c.num_qubits) {
          out.push_back("step " + std::to_string(si) + ": qubit " + std::to_string(q) + " outside width " +
                        std::to_string(c.num_qubits));
          continue;
        }
        if (!used.insert(q).second)
          out.push_back("step " + std::to_string(si) + ": qubit " + std::to_string(q) +
                        " used by two gates in one step");
      }
      if (op.kind == GateOp::Kind::kUnitary2 && op.targets[0] == op.targets[1])
        out.push_back("step " + std::to_string(si) + ": two-qubit gate with duplicate targets");
      if (op.kind == GateOp::Kind::kControlledPauli) check_bits_readable(op.cond, si, "controlled gate");
      if (op.kind == GateOp::Kind::kMeasure) {
        if (op.bit < 0 || op.bit >= c.classical_bits)
          out.push_back("step " + std::to_string(si) + ": measurement writes bit " + std::to_string(op.bit) +
                        " outside [0, " + std::to_string(c.classical_bits) + ")");
        else
          bit_written[static_cast<std::size_t>(op.bit)] = true;
      }
    }
    for (const RetryBlock& rb : c.retry_blocks)
      if (rb.last_step == si) check_bits_readable(rb.guard, si, "retry guard");
  }

  for (std::size_t i = 0; i < c.retry_blocks.size(); ++i) {
    const RetryBlock& a = c.retry_blocks[i];
    if (a.first_step < 0 || a.last_step >= static_cast<int>(c.steps.size()) || a.first_step > a.last_step)
      out.push_back("retry block " + std::to_string(i) + ": bad span");
    if (a.max_retries < 0) out.push_back("retry block " + std::to_string(i) + ": negative retry count");
    for (std::size_t j = i + 1; j < c.retry_blocks.size(); ++j) {
      const RetryBlock& b = c.retry_blocks[j];
      const bool disjoint = a.last_step < b.first_step || b.last_step < a.first_step;
      const bool a_in_b = b.first_step <= a.first_step && a.last_step <= b.last_step;
      const bool b_in_a = a.first_step <= b.first_step && b.last_step <= a.last_step;
      if (!disjoint && !a_in_b && !b_in_a)
        out.push_back("retry blocks " + std::to_string(i) + " and " + std::to_string(j) +
                      " overlap without nesting");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

json mat_to_json(const Amp* data, std::size_t n) {
  json arr = json::array();
  for (std::size_t i = 0; i < n; ++i) arr.push_back(json::array({data[i].real(), data[i].imag()}));
  return arr;
}

void mat_from_json(const json& arr, Amp* data, std::size_t n) {
  if (!arr.is_array() || arr.size() != n) throw std::invalid_argument("circuit json: bad matrix size");
  for (std::size_t i = 0; i < n; ++i)
    data[i] = Amp{arr[i].at(0).get<double>(), arr[i].at(1).get<double>()};
}

json cond_to_json(const ParityCond& c) {
  return json{{"xor_bits", c.bits}, {"negate", c.negate}};
}

ParityCond cond_from_json(const json& j) {
  ParityCond c;
  c.bits = j.at("xor_bits").get<std::vector<int>>();
  c.negate = j.value("negate", false);
  return c;
}

}  // namespace

std::string circuit_to_json(const Circuit& c) {
  json j;
  j["num_qubits"] = c.num_qubits;
  j["classical_bits"] = c.classical_bits;
  json steps = json::array();
  for (const TimeStep& step : c.steps) {
    json ops = json::array();
    for (const GateOp& op : step.ops) {
      json o;
      switch (op.kind) {
        case GateOp::Kind::kUnitary1:
          o["kind"] = "unitary1";
          o["targets"] = {op.targets[0]};
          o["matrix"] = mat_to_json(op.u2.a.data(), 4);
          break;
        case GateOp::Kind::kUnitary2:
          o["kind"] = "unitary2";
          o["targets"] = {op.targets[0], op.targets[1]};
          o["matrix"] = mat_to_json(op.u4.a.data(), 16);
          break;
        case GateOp::Kind::kMeasure:
          o["kind"] = "measure";
          o["targets"] = {op.targets[0]};
          o["bit"] = op.bit;
          break;
        case GateOp::Kind::kReset:
          o["kind"] = "reset";
          o["targets"] = {op.targets[0]};
          break;
        case GateOp::Kind::kControlledPauli:
          o["kind"] = "controlled_pauli";
          o["targets"] = {op.targets[0]};
          o["pauli"] = pauli_error_name(op.pauli);
          o["condition"] = cond_to_json(op.cond);
          break;
      }
      ops.push_back(std::move(o));
    }
    steps.push_back(std::move(ops));
  }
  j["steps"] = std::move(steps);
  json blocks = json::array();
  for (const RetryBlock& rb : c.retry_blocks) {
    blocks.push_back(json{{"first_step", rb.first_step},
                          {"last_step", rb.last_step},
                          {"guard", cond_to_json(rb.guard)},
                          {"max_retries", rb.max_retries}});
  }
  j["retry_blocks"] = std::move(blocks);
  return j.dump(2);
}

Circuit circuit_from_json(const std::string& text) {
  const json j = json::parse(text);
  Circuit c;
  c.num_qubits = j.at("num_qubits").get<int>();
  c.classical_bits = j.value("classical_bits", 0);
  for (const json& step_j : j.at("steps")) {
    TimeStep step;
    for (const json& o : step_j) {
      const std::string kind = o.at("kind").get<std::string>();
      const auto targets = o.at("targets").get<std::vector<int>>();
      if (kind == "unitary1") {
        Mat2 u;
        mat_from_json(o.at("matrix"), u.a.data(), 4);
        step.ops.push_back(GateOp::unitary1(targets.at(0), u));
      } else if (kind == "unitary2") {
        Mat4 u;
        mat_from_json(o.at("matrix"), u.a.data(), 16);
        step.ops.push_back(GateOp::unitary2(targets.at(0), targets.at(1), u));
      } else if (kind == "measure") {
        step.ops.push_back(GateOp::measure(targets.at(0), o.at("bit").get<int>()));
      } else if (kind == "reset") {
        step.ops.push_back(GateOp::reset(targets.at(0)));
      } else if (kind == "controlled_pauli") {
        step.ops.push_back(GateOp::controlled_pauli(
            targets.at(0), pauli_error_from_name(o.at("pauli").get<std::string>()),
            cond_from_json(o.at("condition"))));
      } else {
        throw std::invalid_argument("circuit json: unknown op kind '" + kind + "'");
      }
    }
    c.steps.push_back(std::move(step));
  }
  if (j.contains("retry_blocks")) {
    for (const json& b : j.at("retry_blocks")) {
      RetryBlock rb;
      rb.first_step = b.at("first_step").get<int>();
      rb.last_step = b.at("last_step").get<int>();
      rb.guard = cond_from_json(b.at("guard"));
      rb.max_retries = b.value("max_retries", 1);
      c.retry_blocks.push_back(std::move(rb));
    }
  }
  return c;
}

void save_circuit(const Circuit& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << circuit_to_json(c) << '\n';
}

Circuit load_circuit(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return circuit_from_json(text);
}

}  // namespace ftprep
