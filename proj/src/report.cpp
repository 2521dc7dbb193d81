#include "tsl/report.hpp"

#include <iomanip>
#include <map>
#include <sstream>

namespace tsl {

std::string param_hash(const Json& params) {
    std::string dump = params.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

Json report_merge(const std::vector<Json>& reports) {
    std::map<std::pair<std::string, std::string>, VerifyReport> rows;
    for (const auto& j : reports) {
        VerifyReport r = VerifyReport::from_json(j);
        auto key = std::make_pair(r.lemma, param_hash(r.params));
        auto it = rows.find(key);
        if (it == rows.end()) {
            rows.emplace(key, std::move(r));
        } else {
            VerifyReport& acc = it->second;
            acc.instances += r.instances;
            if (r.worst_slack.lo() < acc.worst_slack.lo()) {
                acc.worst_slack = r.worst_slack;
                acc.witness = r.witness;
            }
            acc.pass = acc.pass && r.pass;
            acc.sampled = acc.sampled || r.sampled;
        }
    }
    Json out;
    Json arr = Json::array();
    bool all_pass = true;
    int total = 0;
    bool have_worst = false;
    Enclosure worst;
    for (const auto& [key, r] : rows) {
        Json row = r.to_json();
        row["param_hash"] = key.second;
        arr.push_back(std::move(row));
        all_pass = all_pass && r.pass;
        total += r.instances;
        if (r.instances > 0 && (!have_worst || r.worst_slack.lo() < worst.lo())) {
            worst = r.worst_slack;
            have_worst = true;
        }
    }
    out["reports"] = std::move(arr);
    Json global;
    global["all_pass"] = all_pass;
    global["total_instances"] = total;
    if (have_worst) global["worst_slack"] = enclosure_to_json(worst);
    out["global"] = std::move(global);
    return out;
}

}  // namespace tsl
