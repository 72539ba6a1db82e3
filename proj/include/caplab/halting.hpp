#pragma once
// Two-counter machines and the halting-vs-overfitting demonstration: a
// budgeted learner that switches from a maximally-wrong model to a memorized
// model exactly when its embedded program halts within the budget, so the
// overfitting verdict decides halting.
//
// Machine: two registers r0, r1 (initialized from the input word), program
// counter starting at 0, instructions
//   INC r        r += 1
//   DEC r        r -= 1 when r > 0 (no-op at 0)
//   JZ r addr    jump to addr when r == 0
//   JMP addr     jump to addr
//   HALT         stop
// Each executed instruction costs one step; HALT's execution is counted.
// Running past the last instruction also halts (treated as an implicit HALT
// at the step that fell off). Jump targets must lie inside the program.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "caplab/common.hpp"
#include "caplab/diagnostics.hpp"
#include "caplab/learners.hpp"
#include "caplab/problem.hpp"

namespace caplab {

enum class OpCode { Inc, Dec, Jz, Jmp, Halt };

struct Instruction {
  OpCode op = OpCode::Halt;
  int reg = 0;     // Inc / Dec / Jz
  int target = 0;  // Jz / Jmp
};

struct CounterProgram {
  std::vector<Instruction> instructions;
  void validate() const;  // register indices in {0,1}, targets in range
};

struct MachineInput {
  std::uint64_t r0 = 0;
  std::uint64_t r1 = 0;
};

struct RunResult {
  bool halted = false;
  std::uint64_t steps = 0;  // steps executed (= budget when not halted)
};

/// Execute at most `budget` steps. Deterministic; monotone in the budget.
RunResult run_bounded(const CounterProgram& program, MachineInput input,
                      std::uint64_t budget);

/// One instruction per line: "INC 0", "DEC 1", "JZ 0 4", "JMP 2", "HALT".
/// '#' starts a comment; blank lines are skipped.
CounterProgram parse_program(std::string_view text);

struct CorpusEntry {
  std::string name;
  CounterProgram program;
  MachineInput input;
};

/// Multi-program corpus: blocks starting with "program <name> [r0 [r1]]"
/// followed by instruction lines.
std::vector<CorpusEntry> parse_corpus(std::string_view text);

enum class Phase { Anti, Memorized };

const char* to_string(Phase phase);

/// The budgeted anti-learner/memorizer pair for one program and training set.
class APrime {
 public:
  APrime(CounterProgram program, MachineInput input, Dataset train_set,
         Hypothesis anti_model, Hypothesis memorized_model);

  Phase phase(std::uint64_t budget) const;
  const Hypothesis& model_at(std::uint64_t budget) const;
  RunResult run(std::uint64_t budget) const;

  const Dataset& train_set() const { return train_set_; }
  const CounterProgram& program() const { return program_; }

 private:
  CounterProgram program_;
  MachineInput input_;
  Dataset train_set_;
  Hypothesis anti_model_;
  Hypothesis memorized_model_;
};

/// Resolve the two phase models through the actual learners (memorizer and
/// anti-learner over `gspace`); the loss must be bounded.
APrime build_a_prime(CounterProgram program, MachineInput input,
                     const Dataset& train_set,
                     std::shared_ptr<const HypothesisSpace> gspace,
                     const LossFunction& loss);

struct IffReport {
  bool halted = false;
  std::uint64_t steps = 0;
  Phase phase = Phase::Anti;
  Verdict verdict;   // observational overfit of the phase model
  bool agree = false;  // (verdict == YES) == halted
};

/// Runs the machine under `budget`, evaluates the phase model's
/// observational-overfit verdict against `dist`, and reports whether the
/// verdict decides halting. Precondition: `dist` puts mass on datasets other
/// than the training set (otherwise the verdicts are vacuous and this throws
/// ValidationError).
IffReport overfit_iff_halts(const APrime& ap, const DatasetDistribution& dist,
                            const LossFunction& loss, std::uint64_t budget);

}  // namespace caplab
