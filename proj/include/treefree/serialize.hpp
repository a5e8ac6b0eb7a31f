#pragma once

#include <json.hpp>

#include "treefree/digraph.hpp"
#include "treefree/law.hpp"
#include "treefree/model.hpp"
#include "treefree/tree.hpp"

namespace treefree {

using Json = nlohmann::json;

Json digraph_to_json(const Digraph& g);
Digraph digraph_from_json(const Json& j);

Json tree_to_json(const TreeSpec& t);
TreeSpec tree_from_json(const Json& j);

Json law_to_json(const ScalarLaw& mu);
ScalarLaw law_from_json(const Json& j);

Json model_to_json(const PointedModel& m);
PointedModel model_from_json(const Json& j);

Json finite_tree_to_json(const FiniteTree& t);

} // namespace treefree
