#include "cascade/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cascade/error.hpp"
#include "cascade/format.hpp"

#ifndef CASCADE_VERSION
#define CASCADE_VERSION "unknown"
#endif

namespace cascade {

namespace {

using Json = nlohmann::ordered_json;

// Echoes the config text as {section: {key: value}} with top-level keys at
// the root, so the manifest is greppable without reparsing the config.
Json config_object(const std::string& text) {
    Json root = Json::object();
    Json* current = &root;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto s = trim(line);
        if (s.empty() || s.front() == '#' || s.front() == ';') continue;
        if (s.front() == '[' && s.back() == ']') {
            const std::string name(s.substr(1, s.size() - 2));
            root[name] = Json::object();
            current = &root[name];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) continue;
        (*current)[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
    }
    return root;
}

Json diagnostic_json(const Diagnostic& d) {
    return std::visit([](const auto& v) { return Json(v); }, d);
}

Diagnostic diagnostic_from(const nlohmann::json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number()) return j.get<double>();
    if (j.is_null()) return std::string("null");
    return j.get<std::string>();
}

} // namespace

std::string software_version() { return CASCADE_VERSION; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    Json j;
    j["version"] = m.version;
    j["model"] = m.model;
    j["seed"] = m.seed;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["wall_seconds"] = m.wall_seconds;
    j["files"] = m.files;
    j["config"] = config_object(m.config_text);
    j["config_text"] = m.config_text;
    Json diag = Json::object();
    for (const auto& [k, v] : m.diagnostics) diag[k] = diagnostic_json(v);
    j["diagnostics"] = diag;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    RunManifest m;
    try {
        const auto j = nlohmann::json::parse(in);
        m.version = j.at("version").get<std::string>();
        m.model = j.at("model").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        m.wall_seconds = j.at("wall_seconds").get<double>();
        m.files = j.at("files").get<std::vector<std::string>>();
        m.config_text = j.value("config_text", std::string{});
        if (j.contains("diagnostics"))
            for (const auto& [k, v] : j.at("diagnostics").items()) m.diagnostics.emplace(k, diagnostic_from(v));
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest " + path.string() + ": " + e.what());
    }
    return m;
}

std::vector<std::string> missing_files(const RunManifest& m, const std::filesystem::path& dir) {
    std::vector<std::string> out;
    for (const auto& f : m.files)
        if (!std::filesystem::exists(dir / f)) out.push_back(f);
    return out;
}

} // namespace cascade
