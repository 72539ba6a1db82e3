#include "caplab/halting.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace caplab {
namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string strip_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

int parse_register(const std::string& tok, std::size_t line_no) {
  if (tok != "0" && tok != "1")
    throw ValidationError("program line " + std::to_string(line_no) +
                          ": register must be 0 or 1");
  return tok == "0" ? 0 : 1;
}

int parse_target(const std::string& tok, std::size_t line_no) {
  try {
    const int v = std::stoi(tok);
    if (v < 0) throw std::invalid_argument("negative");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("program line " + std::to_string(line_no) +
                          ": bad jump target '" + tok + "'");
  }
}

}  // namespace

void CounterProgram::validate() const {
  if (instructions.empty())
    throw ValidationError("CounterProgram: empty program");
  const int len = static_cast<int>(instructions.size());
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    const Instruction& ins = instructions[i];
    if ((ins.op == OpCode::Inc || ins.op == OpCode::Dec || ins.op == OpCode::Jz) &&
        (ins.reg < 0 || ins.reg > 1))
      throw ValidationError("CounterProgram: instruction " + std::to_string(i) +
                            " uses a register outside {0, 1}");
    if ((ins.op == OpCode::Jz || ins.op == OpCode::Jmp) &&
        (ins.target < 0 || ins.target >= len))
      throw ValidationError("CounterProgram: instruction " + std::to_string(i) +
                            " jumps outside the program");
  }
}

RunResult run_bounded(const CounterProgram& program, MachineInput input,
                      std::uint64_t budget) {
  program.validate();
  std::uint64_t regs[2] = {input.r0, input.r1};
  std::size_t pc = 0;
  RunResult res;
  while (res.steps < budget) {
    if (pc >= program.instructions.size()) {
      // Fell off the end on the previous step: implicit halt, no extra step.
      res.halted = true;
      return res;
    }
    const Instruction& ins = program.instructions[pc];
    ++res.steps;
    switch (ins.op) {
      case OpCode::Inc:
        ++regs[ins.reg];
        ++pc;
        break;
      case OpCode::Dec:
        if (regs[ins.reg] > 0) --regs[ins.reg];
        ++pc;
        break;
      case OpCode::Jz:
        pc = regs[ins.reg] == 0 ? static_cast<std::size_t>(ins.target) : pc + 1;
        break;
      case OpCode::Jmp:
        pc = static_cast<std::size_t>(ins.target);
        break;
      case OpCode::Halt:
        res.halted = true;
        return res;
    }
  }
  // Budget exhausted; a fall-off-the-end pending at pc == size still counts
  // as halted only if we get to observe it, which requires one more loop
  // entry -- check it here so the phase is monotone in the budget.
  if (pc >= program.instructions.size()) res.halted = true;
  return res;
}

CounterProgram parse_program(std::string_view text) {
  CounterProgram prog;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tok{strip_comment(line)};
    std::string op;
    if (!(tok >> op)) continue;  // blank or comment-only line
    op = upper(op);
    Instruction ins;
    std::string a, b;
    if (op == "INC" || op == "DEC") {
      if (!(tok >> a))
        throw ValidationError("program line " + std::to_string(line_no) +
                              ": missing register");
      ins.op = op == "INC" ? OpCode::Inc : OpCode::Dec;
      ins.reg = parse_register(a, line_no);
    } else if (op == "JZ") {
      if (!(tok >> a >> b))
        throw ValidationError("program line " + std::to_string(line_no) +
                              ": JZ needs a register and a target");
      ins.op = OpCode::Jz;
      ins.reg = parse_register(a, line_no);
      ins.target = parse_target(b, line_no);
    } else if (op == "JMP") {
      if (!(tok >> a))
        throw ValidationError("program line " + std::to_string(line_no) +
                              ": JMP needs a target");
      ins.op = OpCode::Jmp;
      ins.target = parse_target(a, line_no);
    } else if (op == "HALT") {
      ins.op = OpCode::Halt;
    } else {
      throw ValidationError("program line " + std::to_string(line_no) +
                            ": unknown instruction '" + op + "'");
    }
    std::string extra;
    if (tok >> extra)
      throw ValidationError("program line " + std::to_string(line_no) +
                            ": trailing tokens");
    prog.instructions.push_back(ins);
  }
  prog.validate();
  return prog;
}

std::vector<CorpusEntry> parse_corpus(std::string_view text) {
  std::vector<CorpusEntry> corpus;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string current_name;
  MachineInput current_input;
  std::string current_body;
  const auto flush = [&]() {
    if (current_name.empty()) return;
    CorpusEntry e;
    e.name = current_name;
    e.program = parse_program(current_body);
    e.input = current_input;
    corpus.push_back(std::move(e));
    current_body.clear();
  };
  while (std::getline(in, line)) {
    const std::string code = strip_comment(line);
    std::istringstream tok{code};
    std::string first;
    if (!(tok >> first)) {
      current_body += "\n";
      continue;
    }
    if (upper(first) == "PROGRAM") {
      flush();
      if (!(tok >> current_name))
        throw ValidationError("corpus: program block without a name");
      current_input = MachineInput{};
      std::string r0, r1;
      if (tok >> r0) current_input.r0 = std::stoull(r0);
      if (tok >> r1) current_input.r1 = std::stoull(r1);
    } else {
      if (current_name.empty())
        throw ValidationError("corpus: instruction before any program block");
      current_body += code;
      current_body += "\n";
    }
  }
  flush();
  if (corpus.empty()) throw ValidationError("corpus: no programs found");
  return corpus;
}

const char* to_string(Phase phase) {
  return phase == Phase::Anti ? "ANTI" : "MEMORIZED";
}

APrime::APrime(CounterProgram program, MachineInput input, Dataset train_set,
               Hypothesis anti_model, Hypothesis memorized_model)
    : program_(std::move(program)),
      input_(input),
      train_set_(std::move(train_set)),
      anti_model_(std::move(anti_model)),
      memorized_model_(std::move(memorized_model)) {
  program_.validate();
}

Phase APrime::phase(std::uint64_t budget) const {
  return run(budget).halted ? Phase::Memorized : Phase::Anti;
}

const Hypothesis& APrime::model_at(std::uint64_t budget) const {
  return phase(budget) == Phase::Memorized ? memorized_model_ : anti_model_;
}

RunResult APrime::run(std::uint64_t budget) const {
  return run_bounded(program_, input_, budget);
}

APrime build_a_prime(CounterProgram program, MachineInput input,
                     const Dataset& train_set,
                     std::shared_ptr<const HypothesisSpace> gspace,
                     const LossFunction& loss) {
  const InstanceSpace space = train_set.space();
  const LearnerProfile memo = memorizer(space, gspace);
  const LearnerProfile anti = anti_learner(space, gspace, loss);
  const auto resolve = [&](const LearnerProfile& learner) {
    const SimplexVector row = learner.row_for(train_set, Mode::Final);
    for (std::size_t i = 0; i < row.dim(); ++i)
      if (row[i] >= 1.0 - kSimplexTol) return gspace->at(i);
    throw ConstructionError("build_a_prime: learner output is not a point mass");
  };
  return APrime(std::move(program), input, train_set, resolve(anti),
                resolve(memo));
}

IffReport overfit_iff_halts(const APrime& ap, const DatasetDistribution& dist,
                            const LossFunction& loss, std::uint64_t budget) {
  // The demo needs off-training-set mass; a distribution concentrated on the
  // training set makes both verdicts vacuously NO.
  const double p_train = dist.dataset_probability(ap.train_set());
  if (p_train >= 1.0 - kSimplexTol)
    throw ValidationError(
        "overfit_iff_halts: dataset distribution is concentrated on the "
        "training set");

  IffReport rep;
  const RunResult run = ap.run(budget);
  rep.halted = run.halted;
  rep.steps = run.steps;
  rep.phase = ap.phase(budget);
  rep.verdict = observational_overfit(ap.model_at(budget), ap.train_set(),
                                      dist, loss);
  rep.agree = (rep.verdict.decision == Decision::Yes) == rep.halted;
  return rep;
}

}  // namespace caplab
