#include "macjscc/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace macjscc {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kProbFloor = 1e-15;

// Compensated (Kahan) sum, so the mass check does not degrade with table size.
double kahan_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void check_vars(const std::vector<Var>& vars, const char* ctx) {
  std::unordered_set<std::string> seen;
  for (const Var& v : vars) {
    if (v.name.empty()) throw input_error(std::string(ctx) + ": empty variable name");
    if (v.size < 1) throw input_error(std::string(ctx) + ": variable " + v.name + " has size < 1");
    if (!seen.insert(v.name).second)
      throw input_error(std::string(ctx) + ": duplicate variable name " + v.name);
  }
}

int64_t state_count(const std::vector<Var>& vars, const char* ctx) {
  int64_t n = 1;
  for (const Var& v : vars) {
    n *= v.size;
    if (n > Pmf::kMaxStates)
      throw input_error(std::string(ctx) + ": state space exceeds 10^7");
  }
  return n;
}

}  // namespace

Pmf::Pmf(std::vector<Var> variables, std::vector<double> probs)
    : vars_(std::move(variables)), probs_(std::move(probs)) {
  check_vars(vars_, "Pmf");
  int64_t n = state_count(vars_, "Pmf");
  if (static_cast<int64_t>(probs_.size()) != n)
    throw input_error("Pmf: table size does not match variable sizes");
  for (double p : probs_)
    if (!(p >= 0.0)) throw input_error("Pmf: negative or NaN probability");
  double mass = kahan_sum(probs_);
  if (std::abs(mass - 1.0) > kMassTol)
    throw input_error("Pmf: probabilities sum to " + std::to_string(mass) + ", not 1");
  strides_.assign(vars_.size(), 1);
  for (int i = static_cast<int>(vars_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * vars_[i + 1].size;
}

int Pmf::var_index(const std::string& name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  throw input_error("Pmf: unknown variable " + name);
}

bool Pmf::has_var(const std::string& name) const {
  for (const Var& v : vars_)
    if (v.name == name) return true;
  return false;
}

std::vector<int> Pmf::var_indices(const std::vector<std::string>& names) const {
  std::vector<int> out;
  out.reserve(names.size());
  std::unordered_set<std::string> seen;
  for (const std::string& n : names) {
    if (!seen.insert(n).second) throw input_error("Pmf: repeated variable " + n + " in subset");
    out.push_back(var_index(n));
  }
  return out;
}

int64_t Pmf::state_of(const std::vector<int>& symbols) const {
  if (symbols.size() != vars_.size())
    throw input_error("Pmf: symbol count does not match variable count");
  int64_t s = 0;
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (symbols[i] < 0 || symbols[i] >= vars_[i].size)
      throw input_error("Pmf: symbol out of range for " + vars_[i].name);
    s += strides_[i] * symbols[i];
  }
  return s;
}

Pmf Pmf::marginal(const std::vector<std::string>& subset) const {
  std::vector<int> idx = var_indices(subset);
  std::vector<Var> mvars;
  mvars.reserve(idx.size());
  for (int i : idx) mvars.push_back(vars_[i]);
  int64_t mstates = 1;
  for (const Var& v : mvars) mstates *= v.size;
  std::vector<int64_t> mstrides(mvars.size(), 1);
  for (int i = static_cast<int>(mvars.size()) - 2; i >= 0; --i)
    mstrides[i] = mstrides[i + 1] * mvars[i + 1].size;

  std::vector<double> acc(mstates, 0.0);
  for (int64_t s = 0; s < states(); ++s) {
    double p = probs_[s];
    if (p == 0.0) continue;
    int64_t ms = 0;
    for (size_t j = 0; j < idx.size(); ++j) ms += mstrides[j] * digit(s, idx[j]);
    acc[ms] += p;
  }
  return Pmf(std::move(mvars), std::move(acc));
}

Kernel::Kernel(std::vector<Var> inputs, Var output, std::vector<std::vector<double>> rws)
    : input_vars(std::move(inputs)), output_var(std::move(output)), rows(std::move(rws)) {
  std::vector<Var> all = input_vars;
  all.push_back(output_var);
  check_vars(all, "Kernel");
  int64_t nrows = 1;
  for (const Var& v : input_vars) nrows *= v.size;
  if (static_cast<int64_t>(rows.size()) != nrows)
    throw input_error("Kernel: row count does not match input sizes");
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != output_var.size)
      throw input_error("Kernel: row length does not match output size");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw input_error("Kernel: negative or NaN probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kMassTol)
      throw input_error("Kernel: row sums to " + std::to_string(sum) + ", not 1");
  }
}

double entropy(const Pmf& pmf, const std::vector<std::string>& subset) {
  if (subset.empty()) return 0.0;
  Pmf m = pmf.marginal(subset);
  double h = 0.0;
  for (double p : m.probs())
    if (p >= kProbFloor) h -= p * std::log2(p);
  return h;
}

double conditional_entropy(const Pmf& pmf, const std::vector<std::string>& a,
                           const std::vector<std::string>& given) {
  std::vector<std::string> joint = a;
  joint.insert(joint.end(), given.begin(), given.end());
  return entropy(pmf, joint) - entropy(pmf, given);
}

double mutual_information(const Pmf& pmf, const std::vector<std::string>& a,
                          const std::vector<std::string>& b,
                          const std::vector<std::string>& given) {
  auto join = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
    std::vector<std::string> out = x;
    out.insert(out.end(), y.begin(), y.end());
    return out;
  };
  double i = entropy(pmf, join(a, given)) + entropy(pmf, join(b, given)) -
             entropy(pmf, given) - entropy(pmf, join(join(a, b), given));
  return std::max(0.0, i);
}

Pmf push_through(const Pmf& pmf, const Kernel& kernel) {
  if (pmf.has_var(kernel.output_var.name))
    throw input_error("push_through: output name " + kernel.output_var.name + " already present");
  std::vector<int> in_idx;
  in_idx.reserve(kernel.input_vars.size());
  for (const Var& v : kernel.input_vars) {
    int i = pmf.var_index(v.name);
    if (pmf.variables()[i].size != v.size)
      throw input_error("push_through: size mismatch for input " + v.name);
    in_idx.push_back(i);
  }
  int osize = kernel.output_var.size;
  if (pmf.states() > Pmf::kMaxStates / osize)
    throw input_error("push_through: state space exceeds 10^7");

  std::vector<int64_t> kstrides(kernel.input_vars.size(), 1);
  for (int i = static_cast<int>(kernel.input_vars.size()) - 2; i >= 0; --i)
    kstrides[i] = kstrides[i + 1] * kernel.input_vars[i + 1].size;

  std::vector<Var> out_vars = pmf.variables();
  out_vars.push_back(kernel.output_var);
  std::vector<double> out(pmf.states() * osize, 0.0);
  for (int64_t s = 0; s < pmf.states(); ++s) {
    double p = pmf.probs()[s];
    int64_t row = 0;
    for (size_t j = 0; j < in_idx.size(); ++j) row += kstrides[j] * pmf.digit(s, in_idx[j]);
    const std::vector<double>& dist = kernel.rows[row];
    for (int y = 0; y < osize; ++y) out[s * osize + y] = p * dist[y];
  }
  return Pmf(std::move(out_vars), std::move(out));
}

Pmf make_pmf(std::vector<Var> variables, std::vector<double> weights) {
  double total = kahan_sum(weights);
  if (!(total > 0.0)) throw input_error("make_pmf: total weight must be positive");
  for (double& w : weights) w /= total;
  return Pmf(std::move(variables), std::move(weights));
}

Kernel deterministic_kernel(std::vector<Var> inputs, Var output,
                            const std::function<int(const std::vector<int>&)>& fn) {
  return stochastic_kernel(std::move(inputs), output,
                           [&](const std::vector<int>& sym) {
                             std::vector<double> row(output.size, 0.0);
                             int y = fn(sym);
                             if (y < 0 || y >= output.size)
                               throw input_error("deterministic_kernel: output symbol out of range");
                             row[y] = 1.0;
                             return row;
                           });
}

Kernel stochastic_kernel(std::vector<Var> inputs, Var output,
                         const std::function<std::vector<double>(const std::vector<int>&)>& fn) {
  int64_t nrows = 1;
  for (const Var& v : inputs) nrows *= v.size;
  std::vector<std::vector<double>> rows;
  rows.reserve(nrows);
  std::vector<int> sym(inputs.size(), 0);
  for (int64_t r = 0; r < nrows; ++r) {
    int64_t rem = r;
    for (int j = static_cast<int>(inputs.size()) - 1; j >= 0; --j) {
      sym[j] = static_cast<int>(rem % inputs[j].size);
      rem /= inputs[j].size;
    }
    std::vector<double> row = fn(sym);
    double sum = kahan_sum(row);
    if (!(sum > 0.0)) throw input_error("stochastic_kernel: row has no mass");
    for (double& p : row) p /= sum;
    rows.push_back(std::move(row));
  }
  return Kernel(std::move(inputs), std::move(output), std::move(rows));
}

Kernel identity_kernel(const Var& input, const std::string& output_name) {
  return deterministic_kernel({input}, Var{output_name, input.size},
                              [](const std::vector<int>& s) { return s[0]; });
}

Kernel bsc_kernel(const Var& input, const std::string& output_name, double crossover) {
  if (input.size != 2) throw input_error("bsc_kernel: input must be binary");
  if (crossover < 0.0 || crossover > 1.0)
    throw input_error("bsc_kernel: crossover outside [0,1]");
  return Kernel({input}, Var{output_name, 2},
                {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

Kernel independent_kernel(std::vector<Var> inputs, Var output, std::vector<double> dist) {
  return stochastic_kernel(std::move(inputs), std::move(output),
                           [&](const std::vector<int>&) { return dist; });
}

}  // namespace macjscc
