#include "smw/search.hpp"

#include <algorithm>
#include <unordered_map>

namespace smw {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

namespace {

constexpr std::uint32_t kRoot = static_cast<std::uint32_t>(-1);

struct Node {
  std::uint32_t parent = kRoot;
  RuleIndex rule = 0;  // parent·rule = this word
  int side = 0;
};

}  // namespace

SearchResult bidirectional_search(const SMachine& m, const AdmissibleWord& source,
                                  const std::vector<AdmissibleWord>& targets, const SearchOptions& opt) {
  SearchResult res;
  std::unordered_map<AdmissibleWord, std::uint32_t, AdmissibleWordHash> index;
  std::vector<const AdmissibleWord*> words;
  std::vector<Node> nodes;
  auto add = [&](const AdmissibleWord& w, Node n) -> std::uint32_t {
    auto [it, fresh] = index.emplace(w, static_cast<std::uint32_t>(nodes.size()));
    if (!fresh) return it->second;
    words.push_back(&it->first);
    nodes.push_back(n);
    return it->second;
  };
  auto path_to_root = [&](std::uint32_t id) {
    History h;
    while (nodes[id].parent != kRoot) {
      h.push_back(nodes[id].rule);
      id = nodes[id].parent;
    }
    std::reverse(h.begin(), h.end());
    return h;  // root -> id
  };
  auto finish = [&](std::uint32_t a, std::uint32_t b) {
    // a on the source side, b on the target side, same word or linked by one rule.
    History h = path_to_root(a);
    History back = path_to_root(b);
    for (auto it = back.rbegin(); it != back.rend(); ++it) h.push_back(SMachine::inverse_of(*it));
    res.verdict = Verdict::yes;
    res.witness = std::move(h);
    std::uint32_t r = b;
    while (nodes[r].parent != kRoot) r = nodes[r].parent;
    res.target = *words[r];
    res.states = nodes.size();
  };

  add(source, Node{kRoot, 0, 0});
  for (std::uint32_t t = 0; t < targets.size(); ++t) {
    auto it = index.find(targets[t]);
    if (it != index.end()) {
      if (nodes[it->second].side == 0) {
        res.verdict = Verdict::yes;
        res.witness = History{};
        res.target = targets[t];
        res.states = nodes.size();
        return res;
      }
      continue;
    }
    add(targets[t], Node{kRoot, 0, 1});
  }
  std::vector<std::uint32_t> frontier[2];
  frontier[0].push_back(0);
  for (std::uint32_t i = 1; i < nodes.size(); ++i) frontier[1].push_back(i);
  bool capped[2] = {false, false};

  while (true) {
    if (frontier[0].empty() || frontier[1].empty()) {
      const int empty_side = frontier[0].empty() ? 0 : 1;
      res.verdict = capped[empty_side] ? Verdict::unknown : Verdict::no;
      res.states = nodes.size();
      return res;
    }
    if (res.depth >= opt.max_depth) break;
    const int side = frontier[0].size() <= frontier[1].size() ? 0 : 1;
    std::vector<std::uint32_t> next;
    for (std::uint32_t id : frontier[side]) {
      const AdmissibleWord w = *words[id];
      for (RuleIndex r : m.enumeration_order()) {
        if (nodes[id].parent != kRoot && r == SMachine::inverse_of(nodes[id].rule)) continue;
        if (opt.allow && !opt.allow(m.rule(r))) continue;
        auto v = try_apply(m, w, r);
        if (!v) continue;
        if (tape_length(m, v->letters()) > opt.max_tape) {
          capped[side] = true;
          res.tape_capped = true;
          continue;
        }
        auto found = index.find(*v);
        if (found != index.end()) {
          if (nodes[found->second].side != side) {
            // Link the two trees through one extra node on this side.
            std::uint32_t link = static_cast<std::uint32_t>(nodes.size());
            nodes.push_back(Node{id, r, side});
            words.push_back(&found->first);
            if (side == 0) {
              finish(link, found->second);
            } else {
              finish(found->second, link);
            }
            res.depth += 1;
            return res;
          }
          continue;
        }
        if (nodes.size() >= opt.max_states) {
          res.budget_exhausted = true;
          res.states = nodes.size();
          return res;
        }
        next.push_back(add(*v, Node{id, r, side}));
      }
    }
    frontier[side] = std::move(next);
    res.depth += 1;
  }
  res.budget_exhausted = true;
  res.states = nodes.size();
  return res;
}

}  // namespace smw
