#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "banditlab/function_class.hpp"
#include "banditlab/rational.hpp"

namespace banditlab {

// Chain class over actions {0, 1..N}: f_i reads 1/(2i) at the informative
// action 0, 1 at its own arm i, and 0 elsewhere. The unbounded version is
// truncated to [N]; N is recorded in the class name.
ExplicitClass make_informative_chain(int N);

// Actions {a_0, a_1..a_K}: f_i reads i/(4K) at a_0, 1 at a_i, 1/2 elsewhere.
ExplicitClass make_informative_k(int K);

// Complete binary tree with levels 1..d+1 (2^{d+1}-1 actions) and one
// function per root-to-leaf path: target leaf reads 1, other leaves 0,
// on-path internal nodes below the root 0, root and off-path internal nodes
// 1-Delta.
ExplicitClass make_tree_class(int d, const Rational& delta);

// Tree action indexing shared with the descent learner: level is 1-based from
// the root, pos is 1-based within the level.
int tree_num_actions(int d);
ActionId tree_action_index(int level, int pos);

// Bit-lock class: ceil(log2 K) "code" actions A1 read 1/2 +- eps1 and spell
// out k-1 (zero-padded, most-significant bit first); K "arm" actions A2 read
// 1 at a2[k] and 1-eps2 elsewhere. Requires eps1 in (0, 1/4], eps2 in
// (0, eps1].
ExplicitClass make_info_lock(int K, const Rational& eps1, const Rational& eps2);

// Number of A1 (code) actions for a given K.
int info_lock_a1_count(int K);

// Adds an oracle action x0 whose value encodes the lowest-index maximizer of
// each row as (1 + argmax) / encoding_scale; encoding_scale = 0 picks the
// default 2*|A|+2. Fails if an encoded value collides with one of that row's
// base values.
ExplicitClass augment_with_oracle_point(const ExplicitClass& base,
                                        long encoding_scale = 0);

// Projection of a class onto a subset of its actions (rows must stay
// pairwise distinct, e.g. the A2 block of an info-lock class).
ExplicitClass project_actions(const ExplicitClass& cls,
                              const std::vector<ActionId>& actions,
                              const std::string& name);

// Class specs as JSON:
//   {"kind":"tree","d":2,"delta":0.5}
//   {"kind":"info_lock","K":4,"eps1":"0.1","eps2":"0.04"}
//   {"kind":"informative_k","K":8}
//   {"kind":"informative_chain","N":4}
//   {"kind":"oracle_augmented","base":{...},"scale":10}   (scale optional)
//   {"kind":"explicit","rewards":[[0,"1/2^1"],["0.25",1]]}
// Numeric fields may be JSON numbers (binary double, converted exactly) or
// strings (parsed as exact decimals/rationals).
ExplicitClass class_from_json(const nlohmann::json& spec);

// Parses a JSON number-or-string field into an exact rational.
Rational rational_from_json(const nlohmann::json& v);

}  // namespace banditlab
