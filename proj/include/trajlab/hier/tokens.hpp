#pragma once

#include <string>
#include <vector>

namespace trajlab::hier {

enum class Verb { move_n, move_e, move_s, move_w, noop, pick, place, open, close };

/// Metadata for one action token; object/category ids index the domain's
/// inventory and are what grounding corruptions consult.
struct ActionTokenInfo {
  int token = 0;
  Verb verb = Verb::noop;
  int object = -1;    // -1 for moves/noop
  int category = -1;  // object category, -1 when objectless
};

/// Shared token vocabulary: padding, action tokens, state tokens and word
/// tokens all live in one id space so every encoder can share table shapes.
struct TokenCatalog {
  int vocab_size = 0;
  std::vector<ActionTokenInfo> actions;  // indexed by dense action index

  int action_token_begin = 0;  // action tokens occupy [begin, end)
  int action_token_end = 0;

  bool is_action_token(int token) const {
    return token >= action_token_begin && token < action_token_end;
  }
  const ActionTokenInfo& action_info(int token) const;

  /// Action tokens sharing verb and category with `token` but naming a
  /// different object; the substitution pool for grounding corruptions.
  std::vector<int> grounding_alternatives(int token) const;
};

}  // namespace trajlab::hier
