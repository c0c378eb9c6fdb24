// game.hpp -- the bisimulation game as a terminal dialogue.
//
// Each round follows the three-step structure: the attacker picks a side,
// a label and a target; the defender matches (with the empty response
// allowed on silent moves); in branching mode the attacker then selects
// either the post pair or the mid pair as the next configuration. The
// machine side plays optimally from the computed partition and rank
// table, breaking ties by lowest option index.
#pragma once

#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bpa/strategy.hpp"

namespace bpa {

enum class Role { Attacker, Defender, Observer };

enum class GameOutcome {
  AttackerWins,   // defender stuck
  DefenderWins,   // attacker stuck
  Quit,           // human quit or script exhausted
  RoundLimit,     // infinite play cut off; the defender prevails
  Undecided,      // closure cap hit
};

// A configuration of the game: the process pair plus the round counter.
struct GameConfig {
  Process left, right;
  int round = 1;
};

struct GameResult {
  GameOutcome outcome = GameOutcome::Quit;
  int rounds = 0;
  GameConfig finalConfig;
  std::string transcript;
  CapReport capReport{};
};

struct GameIo {
  std::istream* in = nullptr;  // human choices; unused for observers
  std::ostream* ui = nullptr;  // prompts and menus; may be null
};

namespace detail {

struct GameMove {
  int side;  // 0 = left process, 1 = right
  ActId act;
  StateId target;
};

struct DefReply {
  bool empty = false;
  StateId mid = -1;   // branching only
  StateId post = -1;
};

class GameEngine {
 public:
  GameEngine(std::shared_ptr<const Lts> lts, Mode mode, Role humanRole,
             GameIo io, int maxRounds)
      : lts_(std::move(lts)),
        mode_(mode),
        human_(humanRole),
        io_(io),
        maxRounds_(maxRounds),
        rt_(*lts_, mode) {}

  GameResult run(StateId l, StateId r) {
    GameResult res;
    int round = 1;
    while (round <= maxRounds_) {
      auto moves = legalMoves(l, r);
      if (moves.empty()) {
        line(round, "attacker", "stuck", l, r);
        result("defender wins | attacker stuck");
        res.outcome = GameOutcome::DefenderWins;
        break;
      }
      bool quit = false;
      GameMove mv = human_ == Role::Attacker ? humanMove(l, r, moves, round, &quit)
                                             : machineMove(l, r, moves);
      if (quit) {
        result("quit | attacker resigned");
        res.outcome = GameOutcome::Quit;
        break;
      }
      line(round, "attacker", describeMove(mv), l, r);

      StateId from = mv.side == 0 ? l : r;
      StateId other = mv.side == 0 ? r : l;
      auto replies = legalReplies(other, mv);
      if (replies.empty()) {
        line(round, "defender", "stuck", l, r);
        result("attacker wins | defender stuck");
        res.outcome = GameOutcome::AttackerWins;
        res.rounds = round;
        res.finalConfig = GameConfig{lts_->states[l], lts_->states[r], round};
        finish(&res);
        return res;
      }
      DefReply reply = human_ == Role::Defender
                           ? humanReply(replies, round, &quit)
                           : machineReply(from, other, mv, replies);
      if (quit) {
        result("quit | defender resigned");
        res.outcome = GameOutcome::Quit;
        break;
      }
      line(round, "defender", describeReply(reply), l, r);

      StateId nl, nr;
      std::string choiceText;
      if (reply.empty) {
        nl = mv.side == 0 ? mv.target : l;
        nr = mv.side == 0 ? r : mv.target;
        choiceText = "forced";
      } else if (mode_ == Mode::Weak) {
        nl = mv.side == 0 ? mv.target : reply.post;
        nr = mv.side == 0 ? reply.post : mv.target;
        choiceText = "forced";
      } else {
        bool post = human_ == Role::Attacker
                        ? humanChoice(mv, reply, from, round, &quit)
                        : machineChoice(mv.target, from, reply);
        if (quit) {
          result("quit | attacker resigned");
          res.outcome = GameOutcome::Quit;
          break;
        }
        if (post) {
          nl = mv.side == 0 ? mv.target : reply.post;
          nr = mv.side == 0 ? reply.post : mv.target;
          choiceText = "take post pair";
        } else {
          nl = mv.side == 0 ? from : reply.mid;
          nr = mv.side == 0 ? reply.mid : from;
          choiceText = "take mid pair";
        }
      }
      l = nl;
      r = nr;
      line(round, "attacker", choiceText, l, r);
      ++round;
    }
    if (round > maxRounds_) {
      result("round limit reached | defender prevails on infinite play");
      res.outcome = GameOutcome::RoundLimit;
    }
    res.rounds = std::min(round, maxRounds_);
    res.finalConfig =
        GameConfig{lts_->states[l], lts_->states[r], res.rounds};
    finish(&res);
    return res;
  }

  std::string takeTranscript() { return transcript_.str(); }

 private:
  void finish(GameResult* res) { res->transcript = transcript_.str(); }

  std::string proc(StateId s) const {
    return print_process(*lts_->sys, lts_->states[s]);
  }
  void line(int round, const char* player, const std::string& move, StateId l,
            StateId r) {
    transcript_ << "round " << round << " | " << player << " | " << move
                << " | (" << proc(l) << ", " << proc(r) << ")\n";
  }
  void result(const std::string& text) { transcript_ << "result | " << text << "\n"; }

  std::string describeMove(const GameMove& mv) const {
    std::ostringstream os;
    os << "play " << (mv.side == 0 ? "left" : "right") << " "
       << lts_->sys->actName(mv.act) << " -> " << proc(mv.target);
    return os.str();
  }
  std::string describeReply(const DefReply& rp) const {
    if (rp.empty) return "reply empty";
    std::ostringstream os;
    if (mode_ == Mode::Branching)
      os << "reply via " << proc(rp.mid) << " to " << proc(rp.post);
    else
      os << "reply to " << proc(rp.post);
    return os.str();
  }

  std::vector<GameMove> legalMoves(StateId l, StateId r) const {
    std::vector<GameMove> out;
    for (auto& [act, t] : lts_->out[l]) out.push_back({0, act, t});
    for (auto& [act, t] : lts_->out[r]) out.push_back({1, act, t});
    return out;
  }

  std::vector<DefReply> legalReplies(StateId defender,
                                     const GameMove& mv) const {
    std::vector<DefReply> out;
    if (lts_->sys->silent(mv.act)) out.push_back(DefReply{true, -1, -1});
    if (mode_ == Mode::Branching) {
      for (auto& br : rt_.branchingReplies(defender, mv.act))
        out.push_back(DefReply{false, br.mid, br.post});
    } else {
      for (StateId post : rt_.weakReplies(defender, mv.act))
        out.push_back(DefReply{false, -1, post});
    }
    return out;
  }

  // Rank as a survival value: related pairs are best.
  long rankValue(StateId a, StateId b) const {
    int r = rt_.rank(a, b);
    return r == 0 ? std::numeric_limits<long>::max() : r;
  }

  GameMove machineMove(StateId l, StateId r,
                       const std::vector<GameMove>& moves) const {
    if (rt_.rank(l, r) != 0) {
      const int round = rt_.rank(l, r) - 1;
      for (auto& mv : moves) {
        StateId from = mv.side == 0 ? l : r;
        StateId other = mv.side == 0 ? r : l;
        if (!rt_.moveMatched(from, mv.act, mv.target, other, round))
          return mv;
      }
    }
    return moves.front();  // cannot win; lowest index keeps it reproducible
  }

  // The defender values a reply by the rank of the configuration the
  // attacker will select from it (the worse pair in branching mode).
  DefReply machineReply(StateId from, StateId defender, const GameMove& mv,
                        const std::vector<DefReply>& replies) const {
    long best = -1;
    const DefReply* bestReply = nullptr;
    for (auto& rp : replies) {
      long v;
      if (rp.empty) {
        v = rankValue(mv.target, defender);
      } else if (mode_ == Mode::Weak) {
        v = rankValue(mv.target, rp.post);
      } else {
        v = std::min(rankValue(mv.target, rp.post), rankValue(from, rp.mid));
      }
      if (v > best) {
        best = v;
        bestReply = &rp;
      }
    }
    return *bestReply;
  }

  // True selects the post pair.
  bool machineChoice(StateId target, StateId from, const DefReply& rp) const {
    return rankValue(target, rp.post) <= rankValue(from, rp.mid);
  }

  template <class T>
  const T* promptPick(const std::vector<T>& options,
                      const std::function<std::string(const T&)>& show,
                      const char* who, int round, bool* quit) {
    if (io_.ui) {
      (*io_.ui) << "round " << round << ", " << who << " options:\n";
      for (std::size_t i = 0; i < options.size(); ++i)
        (*io_.ui) << "  " << (i + 1) << ") " << show(options[i]) << "\n";
      (*io_.ui) << "  q) quit\nchoose> " << std::flush;
    }
    std::string tok;
    if (!io_.in || !((*io_.in) >> tok) || tok == "q" || tok == "quit") {
      *quit = true;
      return nullptr;
    }
    std::size_t k = 0;
    try {
      k = std::stoul(tok);
    } catch (...) {
      k = 0;
    }
    if (k < 1 || k > options.size()) {
      if (io_.ui) (*io_.ui) << "invalid choice, try again\n";
      return promptPick(options, show, who, round, quit);
    }
    return &options[k - 1];
  }

  GameMove humanMove(StateId l, StateId r, const std::vector<GameMove>& moves,
                     int round, bool* quit) {
    if (io_.ui)
      (*io_.ui) << "configuration (" << proc(l) << ", " << proc(r) << ")\n";
    auto* m = promptPick<GameMove>(
        moves, [&](const GameMove& mv) { return describeMove(mv); },
        "attacker", round, quit);
    return m ? *m : GameMove{0, 0, 0};
  }

  DefReply humanReply(const std::vector<DefReply>& replies, int round,
                      bool* quit) {
    auto* rp = promptPick<DefReply>(
        replies, [&](const DefReply& r) { return describeReply(r); },
        "defender", round, quit);
    return rp ? *rp : DefReply{};
  }

  bool humanChoice(const GameMove& mv, const DefReply& rp, StateId from,
                   int round, bool* quit) {
    struct Option {
      bool post;
    };
    std::vector<Option> opts{{true}, {false}};
    auto* o = promptPick<Option>(
        opts,
        [&](const Option& op) {
          std::ostringstream os;
          if (op.post)
            os << "take post pair ("
               << proc(mv.side == 0 ? mv.target : rp.post) << ", "
               << proc(mv.side == 0 ? rp.post : mv.target) << ")";
          else
            os << "take mid pair (" << proc(mv.side == 0 ? from : rp.mid)
               << ", " << proc(mv.side == 0 ? rp.mid : from) << ")";
          return os.str();
        },
        "attacker (next configuration)", round, quit);
    return o ? o->post : true;
  }

  std::shared_ptr<const Lts> lts_;
  Mode mode_;
  Role human_;
  GameIo io_;
  int maxRounds_;
  RankTable rt_;
  std::ostringstream transcript_;
};

}  // namespace detail

inline GameResult interactive_game(const BpaSystem& sys, const Process& p,
                                   const Process& q, Mode mode,
                                   Role humanRole, GameIo io = {},
                                   int cap = kDefaultCap,
                                   int maxRounds = 1000) {
  auto closure = build_closure(sys, {p, q}, cap);
  if (std::holds_alternative<CapExceeded>(closure)) {
    GameResult res;
    res.outcome = GameOutcome::Undecided;
    auto& ce = std::get<CapExceeded>(closure);
    res.capReport = CapReport{ce.cap, ce.statesExplored};
    return res;
  }
  auto lts = std::make_shared<Lts>(std::move(std::get<Lts>(closure)));
  StateId l = lts->stateOf(p), r = lts->stateOf(q);
  detail::GameEngine engine(lts, mode, humanRole, io, maxRounds);
  return engine.run(l, r);
}

}  // namespace bpa
