#pragma once

#include <vector>

#include "json.hpp"
#include "qgraph/error.hpp"
#include "qgraph/expansion.hpp"
#include "qgraph/isospectrality.hpp"
#include "qgraph/m_function.hpp"
#include "qgraph/reductions.hpp"
#include "qgraph/spectrum.hpp"
#include "qgraph/trig.hpp"

namespace qgraph {

using Json = nlohmann::ordered_json;

Json to_json(const TrigMonomial& m);
Json to_json(const AlphaPolynomial& p);  // [{vars, value}]
Json to_json(const TrigSum& s);          // [{mu_power, factors, coeff}]
Json to_json(const CouplingVector& c);   // {id: "p/q"}

/// Class table: {classes: [{weight, weight_text, f, c_gamma, g_gamma}]}.
Json expansion_json(const SecularExpansion& e);
Json verdict_json(const IsoVerdict& v);
Json report_json(const UniquenessReport& r);
Json sigma_json(const MarkedGraph& g, const CouplingVector& a, const CouplingVector& b);
Json balance_json(std::string_view vertex, const BalanceSides& s);
Json reduction_json(const ReductionResult& r, const CouplingVector* alpha = nullptr,
                    const CouplingVector* alpha2 = nullptr);
Json quasigraph_json(const QuasiGraph& q);
Json search_json(const std::vector<IsoCandidate>& c);
Json spectrum_json(const SpectrumWindow& w);
Json error_json(const Error& e);

}  // namespace qgraph
