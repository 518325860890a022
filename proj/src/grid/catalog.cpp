#include "trajlab/grid/catalog.hpp"

#include <array>

#include "trajlab/core/errors.hpp"

namespace trajlab::grid {

namespace {

constexpr std::array<ObjectKind, kObjectCount> kKinds = {{
    {"fridge", false, true, true, -1},
    {"cupboard", false, true, true, -1},
    {"shelf", false, true, true, -1},
    {"sink", false, false, true, -1},
    {"rack", false, false, true, -1},
    {"table", false, false, true, -1},
    {"milk", true, false, false, 0},
    {"juice", true, false, false, 0},
    {"apple", true, false, false, 1},
    {"bread", true, false, false, 1},
    {"plate", true, false, false, 2},
    {"cup", true, false, false, 2},
}};

DomainVocab build_vocab() {
  DomainVocab v;
  hier::TokenCatalog& cat = v.catalog;
  int next = 1;  // token 0 is PAD

  cat.action_token_begin = next;
  auto add_action = [&](Verb verb, int object) {
    hier::ActionTokenInfo info;
    info.token = next++;
    info.verb = verb;
    info.object = object;
    info.category = object >= 0 ? kKinds[static_cast<std::size_t>(object)].category : -1;
    cat.actions.push_back(info);
  };
  add_action(Verb::move_n, -1);
  add_action(Verb::move_e, -1);
  add_action(Verb::move_s, -1);
  add_action(Verb::move_w, -1);
  add_action(Verb::noop, -1);
  for (int o = 0; o < kObjectCount; ++o) {
    if (kKinds[static_cast<std::size_t>(o)].portable) add_action(Verb::pick, o);
  }
  for (int o = 0; o < kObjectCount; ++o) {
    if (kKinds[static_cast<std::size_t>(o)].receptacle) add_action(Verb::place, o);
  }
  for (int o = 0; o < kObjectCount; ++o) {
    if (kKinds[static_cast<std::size_t>(o)].openable) {
      add_action(Verb::open, o);
      add_action(Verb::close, o);
    }
  }
  cat.action_token_end = next;

  v.zone_base = next;
  next += 9;
  v.held_base = next;
  next += 1 + 6;  // empty hand + one token per portable
  v.word_verb_base = next;
  next += 5;
  v.word_object_base = next;
  next += kObjectCount;

  cat.vocab_size = next;
  return v;
}

int portable_index(int obj) {
  int idx = 0;
  for (int o = 0; o < kObjectCount; ++o) {
    if (!kKinds[static_cast<std::size_t>(o)].portable) continue;
    if (o == obj) return idx;
    ++idx;
  }
  throw DegenerateInputError("held_token: object is not portable");
}

}  // namespace

const ObjectKind& object_kind(int obj) {
  if (obj < 0 || obj >= kObjectCount) {
    throw DegenerateInputError("object_kind: unknown object id");
  }
  return kKinds[static_cast<std::size_t>(obj)];
}

int DomainVocab::action_token(Verb v, int object) const {
  for (const auto& info : catalog.actions) {
    if (info.verb == v && info.object == object) return info.token;
  }
  return -1;
}

GridAction DomainVocab::action_of(int token) const {
  const auto& info = catalog.action_info(token);
  return {info.verb, info.object};
}

int DomainVocab::zone_token(const Eigen::Vector2i& pos) const {
  const int zx = std::min(pos.x() / 3, 2);
  const int zy = std::min(pos.y() / 3, 2);
  return zone_base + zy * 3 + zx;
}

int DomainVocab::held_token(int held_object) const {
  if (held_object < 0) return held_base;
  return held_base + 1 + portable_index(held_object);
}

int DomainVocab::word_verb(WordVerb v) const {
  return word_verb_base + static_cast<int>(v);
}

int DomainVocab::word_object(int obj) const {
  if (obj < 0 || obj >= kObjectCount) {
    throw DegenerateInputError("word_object: unknown object id");
  }
  return word_object_base + obj;
}

std::string DomainVocab::describe_action(const GridAction& a) const {
  switch (a.verb) {
    case Verb::move_n: return "move_n";
    case Verb::move_e: return "move_e";
    case Verb::move_s: return "move_s";
    case Verb::move_w: return "move_w";
    case Verb::noop: return "noop";
    case Verb::pick: return std::string("pick_") + object_kind(a.object).name;
    case Verb::place: return std::string("place_") + object_kind(a.object).name;
    case Verb::open: return std::string("open_") + object_kind(a.object).name;
    case Verb::close: return std::string("close_") + object_kind(a.object).name;
  }
  return "?";
}

const DomainVocab& domain_vocab() {
  static const DomainVocab v = build_vocab();
  return v;
}

}  // namespace trajlab::grid
