#include "testroll/report.hpp"

#include <json.hpp>

namespace testroll {

namespace {

using nlohmann::json;

json state_json(const BernoulliState& s) {
    return json{{"mu1", s.mu1}, {"mu0", s.mu0}};
}

json trace_json(const std::vector<TracePoint>& trace) {
    json arr = json::array();
    for (const TracePoint& p : trace) {
        arr.push_back(json{{"m", p.experiment_size},
                           {"worstValue", p.worst_value},
                           {"argmax", state_json(p.argmax)}});
    }
    return arr;
}

}  // namespace

std::string to_json(const DesignRecommendation& rec, bool with_trace, int indent) {
    json j;
    j["criterion"] = rec.criterion;
    j["N"] = rec.population;
    j["feasible"] = rec.feasible;
    if (rec.feasible) {
        j["mStar"] = rec.m_star;
        j["fraction"] = rec.fraction;
    } else {
        j["mStar"] = nullptr;
        j["fraction"] = nullptr;
    }
    j["degenerate"] = rec.degenerate;
    if (rec.least_favorable)
        j["leastFavorable"] = state_json(*rec.least_favorable);
    else
        j["leastFavorable"] = nullptr;
    if (with_trace) j["trace"] = trace_json(rec.trace);
    return j.dump(indent);
}

std::string to_json(const WorstCaseResult& result, int indent) {
    json j;
    j["m"] = result.experiment_size;
    j["value"] = result.value;
    j["argmax"] = state_json(result.argmax);
    j["statesEvaluated"] = result.states_evaluated;
    j["statesPruned"] = result.states_pruned;
    return j.dump(indent);
}

std::string to_json(const LocalizationReport& report, int indent) {
    json rows = json::array();
    for (const LocalizationRow& r : report.rows) {
        rows.push_back(json{{"m", r.experiment_size},
                            {"worstValue", r.worst_value},
                            {"argmax", state_json(r.argmax)},
                            {"gap", r.gap},
                            {"bound", r.bound},
                            {"asserted", r.asserted},
                            {"within", r.within}});
    }
    json j;
    j["N"] = report.population;
    j["rows"] = rows;
    j["allAssertedHold"] = report.all_asserted_hold;
    return j.dump(indent);
}

std::string to_json(const SimEstimate& estimate, int indent) {
    json j;
    j["mean"] = estimate.mean;
    j["stdError"] = estimate.std_error;
    j["replications"] = estimate.replications;
    return j.dump(indent);
}

}  // namespace testroll
