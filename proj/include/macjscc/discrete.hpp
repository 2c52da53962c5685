#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "macjscc/errors.hpp"

namespace macjscc {

// Named finite-alphabet variable.
struct Var {
  std::string name;
  int size = 0;
};

// Dense joint probability table over named finite variables.  Storage is
// row-major: the first variable varies slowest, the last varies fastest.
class Pmf {
 public:
  // Validates shapes, nonnegativity, unique names and total mass 1 (within
  // 1e-12, measured with compensated summation).
  Pmf(std::vector<Var> variables, std::vector<double> probs);

  const std::vector<Var>& variables() const { return vars_; }
  const std::vector<double>& probs() const { return probs_; }
  int64_t states() const { return static_cast<int64_t>(probs_.size()); }

  int var_index(const std::string& name) const;
  std::vector<int> var_indices(const std::vector<std::string>& names) const;
  bool has_var(const std::string& name) const;

  int64_t stride(int var) const { return strides_[var]; }
  // Symbol taken by variable `var` in the flat state index.
  int digit(int64_t state, int var) const {
    return static_cast<int>((state / strides_[var]) % vars_[var].size);
  }
  int64_t state_of(const std::vector<int>& symbols) const;

  // Marginal over `subset`, variables in the order requested.
  Pmf marginal(const std::vector<std::string>& subset) const;

  static constexpr int64_t kMaxStates = 10'000'000;

 private:
  std::vector<Var> vars_;
  std::vector<double> probs_;
  std::vector<int64_t> strides_;
};

// Conditional probability table p(output | inputs).  One stochastic row per
// input configuration, rows ordered row-major over the input variables.
struct Kernel {
  std::vector<Var> input_vars;
  Var output_var;
  std::vector<std::vector<double>> rows;

  Kernel(std::vector<Var> inputs, Var output, std::vector<std::vector<double>> rows);
};

// Shannon entropy of the marginal over `subset`, in bits.  Probabilities
// below 1e-15 contribute zero.
double entropy(const Pmf& pmf, const std::vector<std::string>& subset);

double conditional_entropy(const Pmf& pmf, const std::vector<std::string>& a,
                           const std::vector<std::string>& given);

// I(A; B | C) in bits, clamped to zero from below.
double mutual_information(const Pmf& pmf, const std::vector<std::string>& a,
                          const std::vector<std::string>& b,
                          const std::vector<std::string>& given = {});

// Joint of `pmf` and the kernel output.  The output variable is appended as
// the last (fastest varying) dimension; kernel inputs must be variables of
// `pmf` and the output name must be fresh.
Pmf push_through(const Pmf& pmf, const Kernel& kernel);

// ---- construction helpers ----

// Normalizes a nonnegative weight table to total mass 1.
Pmf make_pmf(std::vector<Var> variables, std::vector<double> weights);

// output = fn(input symbols), deterministic.
Kernel deterministic_kernel(std::vector<Var> inputs, Var output,
                            const std::function<int(const std::vector<int>&)>& fn);

// Row distributions computed per input configuration; rows are normalized.
Kernel stochastic_kernel(std::vector<Var> inputs, Var output,
                         const std::function<std::vector<double>(const std::vector<int>&)>& fn);

Kernel identity_kernel(const Var& input, const std::string& output_name);
Kernel bsc_kernel(const Var& input, const std::string& output_name, double crossover);

// Output drawn from `dist` regardless of the inputs.
Kernel independent_kernel(std::vector<Var> inputs, Var output, std::vector<double> dist);

}  // namespace macjscc
