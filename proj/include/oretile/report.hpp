#pragma once

#include "oretile/bounds.hpp"
#include "oretile/cover.hpp"
#include "oretile/decomposition.hpp"
#include "oretile/pipeline.hpp"
#include "oretile/tiling.hpp"
#include "oretile/transfer.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace oretile {

using Json = nlohmann::ordered_json;

enum class Format { json, csv, text };

Format parse_format(const std::string& name);

// Integers that fit in 64 bits become numbers, larger ones strings.
Json json_integer(const Integer& x);
// "p/q", or "p" for integers
Json json_rational(const Rational& x);

Json to_json(const TilingResult& t);
Json to_json(const CliqueCover& cover);
Json to_json(const DecompositionCertificate& cert);
Json to_json(const SinkSetResult& s);
Json to_json(const ExperimentReport& rep);
Json to_json(const PipelineBatch& batch);
Json to_json(const BoundsTable& table);
Json chromatic_json(const Graph& h, bool with_bottle);

// JSON system description: {"k", "cliques": [{"id", "sizes" | "order", "multiplicity", "links"}]}.
// Missing sizes default to L for every cluster.
ClusterSystem system_from_json(const Json& j, const Integer& L);

// json: pretty printed. csv: the "rows" array as a table when present, otherwise key,value
// pairs of the flattened report. text: aligned key value lines.
void render(std::ostream& out, const Json& report, Format format);

} // namespace oretile
