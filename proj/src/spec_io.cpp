#include "ndkit/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ndkit/errors.hpp"

namespace ndkit {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw ParseError("field '" + where + key + "': unknown key");
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ParseError("field '" + where + key + "': missing");
    return obj.at(key);
}

Tick as_tick(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ParseError("field '" + field + "': expected an integer");
    return v.get<Tick>();
}

std::vector<Tick> as_ticks(const json& v, const std::string& field) {
    if (!v.is_array()) throw ParseError("field '" + field + "': expected an array of integers");
    std::vector<Tick> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_tick(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

Rational as_rational(const json& v, const std::string& field) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (!v.is_string()) throw ParseError("field '" + field + "': expected a rational string such as \"1/4\"");
    try {
        return Rational::parse(v.get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError("field '" + field + "': " + e.what());
    }
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ProtocolSpec parse_spec(const std::string& path) {
    return parse_spec_text(read_file(path), path);
}

ProtocolSpec parse_spec_text(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": malformed document");
    }
    if (!doc.is_object()) throw ParseError(std::string(source) + ": top level must be an object");

    ProtocolSpec spec;
    try {
        reject_unknown(doc, "", {"name", "tick_us", "beacons", "reception", "overheads"});
        if (doc.contains("name")) {
            if (!doc["name"].is_string()) throw ParseError("field 'name': expected a string");
            spec.name = doc["name"].get<std::string>();
        }
        if (doc.contains("tick_us")) spec.tick_us = as_rational(doc["tick_us"], "tick_us");

        const auto& b = require(doc, "", "beacons");
        if (!b.is_object()) throw ParseError("field 'beacons': expected an object");
        reject_unknown(b, "beacons.", {"durations", "gaps", "periodic", "offset"});
        spec.beacons.durations = as_ticks(require(b, "beacons.", "durations"), "beacons.durations");
        spec.beacons.gaps = as_ticks(require(b, "beacons.", "gaps"), "beacons.gaps");
        if (b.contains("periodic")) {
            if (!b["periodic"].is_boolean()) throw ParseError("field 'beacons.periodic': expected true or false");
            spec.beacons.periodic = b["periodic"].get<bool>();
        }
        if (b.contains("offset")) spec.beacons.offset = as_tick(b["offset"], "beacons.offset");

        const auto& r = require(doc, "", "reception");
        if (!r.is_object()) throw ParseError("field 'reception': expected an object");
        if (r.contains("generator")) {
            reject_unknown(r, "reception.", {"generator", "gamma", "seed"});
            if (!r["generator"].is_string()) throw ParseError("field 'reception.generator': expected a preset name");
            const Rational gamma = as_rational(require(r, "reception.", "gamma"), "reception.gamma");
            std::uint64_t seed = 0;
            if (r.contains("seed")) {
                if (!r["seed"].is_number_unsigned()) throw ParseError("field 'reception.seed': expected an unsigned integer");
                seed = r["seed"].get<std::uint64_t>();
            }
            try {
                spec.reception = ReceptionSchedule::make_aperiodic(
                    make_generator(r["generator"].get<std::string>(), gamma, seed));
            } catch (const DomainError& e) {
                throw ParseError(std::string("field 'reception.generator': ") + e.what());
            }
        } else {
            reject_unknown(r, "reception.", {"period", "windows"});
            std::vector<Window> windows;
            const auto& ws = require(r, "reception.", "windows");
            if (!ws.is_array()) throw ParseError("field 'reception.windows': expected an array");
            for (std::size_t i = 0; i < ws.size(); ++i) {
                const std::string where = "reception.windows[" + std::to_string(i) + "].";
                if (!ws[i].is_object()) throw ParseError("field '" + where.substr(0, where.size() - 1) + "': expected an object");
                reject_unknown(ws[i], where, {"offset", "duration"});
                windows.push_back({as_tick(require(ws[i], where, "offset"), where + "offset"),
                                   as_tick(require(ws[i], where, "duration"), where + "duration")});
            }
            spec.reception = ReceptionSchedule::make_periodic(
                as_tick(require(r, "reception.", "period"), "reception.period"), std::move(windows));
        }

        if (doc.contains("overheads")) {
            const auto& o = doc["overheads"];
            if (!o.is_object()) throw ParseError("field 'overheads': expected an object");
            reject_unknown(o, "overheads.", {"tx", "rx", "tx_rx", "rx_tx"});
            if (o.contains("tx")) spec.overheads.tx = as_tick(o["tx"], "overheads.tx");
            if (o.contains("rx")) spec.overheads.rx = as_tick(o["rx"], "overheads.rx");
            if (o.contains("tx_rx")) spec.overheads.tx_rx = as_tick(o["tx_rx"], "overheads.tx_rx");
            if (o.contains("rx_tx")) spec.overheads.rx_tx = as_tick(o["rx_tx"], "overheads.rx_tx");
        }
    } catch (const ParseError& e) {
        throw ParseError(std::string(source) + ": " + e.what());
    }

    if (auto problems = validate_schedule(spec); !problems.empty()) {
        std::string msg = std::string(source) + ": invalid schedule:";
        for (const auto& p : problems) msg += " " + p + ";";
        msg.pop_back();
        throw ParseError(msg, std::move(problems));
    }
    return spec;
}

std::string emit_spec(const ProtocolSpec& spec) {
    json doc;
    doc["name"] = spec.name;
    if (spec.tick_us.is_integer()) {
        doc["tick_us"] = spec.tick_us.num();
    } else {
        doc["tick_us"] = spec.tick_us.str();
    }
    doc["beacons"] = {{"durations", spec.beacons.durations},
                      {"gaps", spec.beacons.gaps},
                      {"periodic", spec.beacons.periodic},
                      {"offset", spec.beacons.offset}};
    if (spec.reception.is_periodic()) {
        json windows = json::array();
        for (const auto& w : spec.reception.windows) windows.push_back({{"offset", w.offset}, {"duration", w.duration}});
        doc["reception"] = {{"period", spec.reception.period}, {"windows", windows}};
    } else {
        const auto& g = spec.reception.generator;
        if (g.preset != "uniform" && g.preset != "alternating" && g.preset != "jitter") {
            throw DomainError("generator '" + g.preset + "' has no document form");
        }
        doc["reception"] = {{"generator", g.preset}, {"gamma", g.gamma.str()}, {"seed", g.seed}};
    }
    doc["overheads"] = {{"tx", spec.overheads.tx},
                        {"rx", spec.overheads.rx},
                        {"tx_rx", spec.overheads.tx_rx},
                        {"rx_tx", spec.overheads.rx_tx}};
    return doc.dump(2) + "\n";
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace ndkit
