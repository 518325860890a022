#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "trajlab/hier/tokens.hpp"

namespace trajlab::grid {

using hier::Verb;

/// Fixed global inventory shared by every scene. Object ids index this table.
enum Obj : int {
  kFridge = 0,
  kCupboard = 1,
  kShelf = 2,
  kSink = 3,
  kRack = 4,
  kTable = 5,
  kMilk = 6,
  kJuice = 7,
  kApple = 8,
  kBread = 9,
  kPlate = 10,
  kCup = 11,
};
inline constexpr int kObjectCount = 12;

struct ObjectKind {
  const char* name;
  bool portable;
  bool openable;    // open/close container
  bool receptacle;  // can hold placed objects
  int category;     // -1 for furniture; portables: 0 drink, 1 food, 2 dish
};

const ObjectKind& object_kind(int obj);

enum class WordVerb { reach = 0, open = 1, close = 2, take = 3, put = 4 };

struct GridAction {
  Verb verb = Verb::noop;
  int object = -1;

  bool operator==(const GridAction&) const = default;
};

/// Token-id layout for the whole domain: PAD, action tokens, agent-zone
/// tokens, held-object tokens, then word tokens for prompts and subgoal
/// descriptions. One id space so all encoders share table shapes.
struct DomainVocab {
  hier::TokenCatalog catalog;
  int zone_base = 0;
  int held_base = 0;
  int word_verb_base = 0;
  int word_object_base = 0;

  int action_token(Verb v, int object) const;  // -1 when not in the domain
  GridAction action_of(int token) const;
  int action_token_count() const {
    return catalog.action_token_end - catalog.action_token_begin;
  }

  int zone_token(const Eigen::Vector2i& pos) const;
  int held_token(int held_object) const;  // -1 = empty hand
  int word_verb(WordVerb v) const;
  int word_object(int obj) const;

  std::string describe_action(const GridAction& a) const;
};

/// Process-wide immutable vocabulary.
const DomainVocab& domain_vocab();

}  // namespace trajlab::grid
