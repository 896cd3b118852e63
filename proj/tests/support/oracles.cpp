#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

namespace oracle {

namespace {

struct Task {
  int thread;
  std::size_t pc;
  bool read_first = false;  // async completion: read, then resume
};

}  // namespace

std::vector<std::string> simulate_scheduler(const SchedulerSpec& spec) {
  std::vector<std::string> out;
  std::map<int, int> reads;
  std::deque<Task> runq;
  std::deque<Task> pending;

  auto print = [&](int tag, long value) { out.push_back("[" + std::to_string(tag) + "] " + std::to_string(value)); };
  auto read = [&](int chan) {
    int& n = reads[chan];
    if (n >= spec.channel_lines) throw std::runtime_error("simulated read past end of channel");
    ++n;
    return 100L * chan + n;
  };
  auto pop = [&]() -> std::optional<Task> {
    if (runq.empty() && spec.io == Io::Async && !pending.empty()) {
      const std::size_t n = spec.io_batch <= 0 ? pending.size() : std::min<std::size_t>(spec.io_batch, pending.size());
      for (std::size_t i = 0; i < n; ++i) {
        Task t = pending.front();
        pending.pop_front();
        t.read_first = true;
        runq.push_back(t);
      }
    }
    if (runq.empty()) return std::nullopt;
    Task t;
    if (spec.discipline == Discipline::Fifo) {
      t = runq.front();
      runq.pop_front();
    } else {
      t = runq.back();
      runq.pop_back();
    }
    return t;
  };

  std::optional<Task> current = Task{0, 0};
  while (current) {
    Task t = *current;
    current.reset();
    const Thread& th = spec.threads.at(t.thread);
    if (t.read_first) {
      print(th.id, read(th.id));
      ++t.pc;
    }
    bool switched = false;
    while (!switched && t.pc < th.script.size()) {
      const Action& a = th.script[t.pc];
      switch (a.act) {
        case Act::Print:
          print(th.id, a.arg);
          ++t.pc;
          break;
        case Act::ReadPrint:
          if (spec.io == Io::Sync) {
            print(th.id, read(th.id));
            ++t.pc;
          } else {
            pending.push_back(Task{t.thread, t.pc});
            current = pop();
            switched = true;
          }
          break;
        case Act::Yield:
          runq.push_back(Task{t.thread, t.pc + 1});
          current = pop();
          switched = true;
          break;
        case Act::Fork:
          runq.push_back(Task{t.thread, t.pc + 1});
          current = Task{a.arg, 0};
          switched = true;
          break;
      }
    }
    if (!switched) current = pop();
  }
  return out;
}

std::int64_t count_resizes(const std::vector<StackEvent>& events, const ResizeModel& m) {
  std::int64_t cap = m.initial_words + m.red_zone_words;
  std::int64_t resizes = 0;
  for (const auto& e : events) {
    const std::int64_t used = e.frames * m.frame_words;
    const std::int64_t need = e.kind == StackEvent::Frames ? used : used + m.red_zone_words;
    while (cap < need) {
      cap *= 2;
      ++resizes;
    }
  }
  return resizes;
}

std::vector<StackEvent> deep_recursion_events(int depth) {
  std::vector<StackEvent> ev;
  auto at = [&](std::int64_t f) { ev.push_back({StackEvent::Frames, f}); };
  auto check = [&](std::int64_t f) { ev.push_back({StackEvent::Check, f}); };

  // Handle: empty fiber, checked.
  check(0);
  // ((f_ f_) D): App1, App1, Var, App3, Var, CallO (checked), App2, App3, CallO (checked).
  for (std::int64_t f : {1, 2, 2, 2, 2}) at(f);
  at(1);
  check(1);
  at(1);
  at(1);
  at(0);
  check(0);
  for (int n = depth; n >= 1; --n) {
    const std::int64_t d = depth - n;
    // (+ (/ 1 n) ...): Arith1, Arith1, Arith2, Var, Arith3, Arith2.
    for (std::int64_t f : {d + 1, d + 2, d + 2, d + 2, d + 1, d + 1}) at(f);
    // ((self self) (- n 1)): App1, App1, Var, App3, Var, CallO (checked).
    for (std::int64_t f : {d + 2, d + 3, d + 3, d + 3, d + 3}) at(f);
    at(d + 2);
    check(d + 2);
    // App2, App3, Arith1, Var, Arith2, Arith3, CallO (checked).
    for (std::int64_t f : {d + 2, d + 2, d + 3, d + 3, d + 3, d + 2}) at(f);
    at(d + 1);
    check(d + 1);
  }
  // n = 0: the division raises; Raise pushes the exception frame.
  const std::int64_t d = depth;
  for (std::int64_t f : {d + 1, d + 2, d + 2, d + 2, d + 1, d + 2}) at(f);
  return ev;
}

std::string deep_recursion_program(int depth) {
  return "(let (f_ (lambda (self) (lambda (n) (+ (/ 1 n) ((self self) (- n 1))))))\n"
         "  (handle ((f_ f_) " +
         std::to_string(depth) +
         ")\n"
         "    (val x x)\n"
         "    (exn Division_by_zero e 0)\n"
         "    (eff Never v k 0)))\n";
}

std::int64_t resize_closed_form(std::int64_t push_peak_frames, std::int64_t check_peak_frames, const ResizeModel& m) {
  const std::int64_t need =
      std::max(push_peak_frames * m.frame_words, check_peak_frames * m.frame_words + m.red_zone_words);
  std::int64_t cap = m.initial_words + m.red_zone_words;
  std::int64_t k = 0;
  while (cap < need) {
    cap *= 2;
    ++k;
  }
  return k;
}

namespace {

class Gen {
 public:
  Gen(std::mt19937_64& rng, const GenOptions& o) : rng_(rng), opts_(o) {}

  std::string program() { return expr(opts_.max_depth, {}); }

 private:
  // Names in scope, plus the effect and exception labels some enclosing
  // handler would catch. Effects stop at C frames; exceptions do not.
  struct Ctx {
    std::vector<std::string> scope;
    unsigned effs = 0;  // bit 0: E, bit 1: F
    unsigned exns = 0;  // bits follow exn_label
  };

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(int percent) { return pick(100) < percent; }
  std::string fresh() { return "x" + std::to_string(next_++); }

  static Ctx bind(Ctx c, const std::string& x) {
    c.scope.push_back(x);
    return c;
  }

  std::string leaf(const Ctx& c) {
    if (!c.scope.empty() && coin(50)) return c.scope[pick(static_cast<int>(c.scope.size()))];
    return std::to_string(pick(12) - 3);
  }

  static const char* exn_label(int i) {
    static const char* labels[] = {"A", "B", "Division_by_zero", "Unhandled"};
    return labels[i];
  }

  // Mostly labels something would catch; now and then any label, so
  // uncaught exceptions and unhandled effects still occur.
  int label_from(unsigned caught, int n) {
    if (caught && !coin(10)) {
      for (;;) {
        const int i = pick(n);
        if (caught & (1u << i)) return i;
      }
    }
    return pick(n);
  }

  std::string expr(int depth, const Ctx& c) {
    if (depth <= 0) return leaf(c);
    const int d = depth - 1;
    switch (pick(12)) {
      case 0:
        return leaf(c);
      case 1: {
        static const char* ops[] = {"+", "-", "*", "/"};
        return std::string("(") + ops[pick(4)] + " " + expr(d, c) + " " + expr(d, c) + ")";
      }
      case 2: {
        const std::string x = fresh();
        return "(let (" + x + " " + expr(d, c) + ") " + expr(d, bind(c, x)) + ")";
      }
      case 3:
        if (!(c.exns & 3u) && coin(70)) return expr(d, c);
        return std::string("(raise ") + exn_label(label_from(c.exns & 3u, 2)) + " " + expr(d, c) + ")";
      case 4:
      case 5:
        if (!c.effs && coin(80)) return expr(d, c);
        return std::string("(perform ") + (label_from(c.effs, 2) == 0 ? "E" : "F") + " " + expr(d, c) + ")";
      case 6:
      case 7:
      case 8:
        return handle(d, c);
      case 9:
        return "(let (_ (print_int " + expr(d, c) + ")) " + expr(d, c) + ")";
      case 10: {
        const std::string v = fresh();
        Ctx in = bind(c, v);
        in.effs = 0;
        return "((clambda (u) ((lambda (" + v + ") " + expr(d, in) + ") u)) " + expr(d, c) + ")";
      }
      default:
        return "((clambda (u) (+ u 1)) " + expr(d, c) + ")";
    }
  }

  std::string handle(int d, const Ctx& c) {
    std::vector<int> exns;
    for (int i = 0; i < 4; ++i)
      if (coin(30)) exns.push_back(i);
    std::vector<int> effs;
    for (int i = 0; i < 2; ++i)
      if (coin(45)) effs.push_back(i);

    Ctx body = c;
    for (int i : exns) body.exns |= 1u << i;
    for (int i : effs) body.effs |= 1u << i;
    std::string s = "(handle " + expr(d, body);
    const std::string x = fresh();
    s += " (val " + x + " " + expr(d - 1, bind(c, x)) + ")";
    for (int i : exns) {
      const std::string e = fresh();
      s += std::string(" (exn ") + exn_label(i) + " " + e + " " + expr(d - 1, bind(c, e)) + ")";
    }
    for (int i : effs) {
      const std::string v = fresh();
      const std::string k = fresh();
      s += std::string(" (eff ") + (i == 0 ? "E" : "F") + " " + v + " " + k + " " + eff_body(d - 1, bind(c, v), k) +
           ")";
    }
    return s + ")";
  }

  // The continuation is mentioned once at most, outside any lambda.
  std::string eff_body(int d, const Ctx& c, const std::string& k) {
    switch (pick(5)) {
      case 0:
        return expr(d, c);
      case 1:
      case 2:
        return "(continue " + k + " " + expr(d, c) + ")";
      case 3:
        return "(+ " + expr(d, c) + " (continue " + k + " " + expr(d, c) + "))";
      default:
        return "(discontinue " + k + " " + (coin(50) ? "A" : "B") + " " + expr(d, c) + ")";
    }
  }

  std::mt19937_64& rng_;
  GenOptions opts_;
  int next_ = 0;
};

}  // namespace

std::string random_program(std::mt19937_64& rng, const GenOptions& opts) { return Gen(rng, opts).program(); }

}  // namespace oracle
