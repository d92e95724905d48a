// Copyright 2026-present the preop-rag project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "preop/clinical.hpp"
#include "preop/error.hpp"
#include "preop/serialization.hpp"
#include "preop/text.hpp"

namespace preop {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool parse_flag(std::string_view s, std::string_view origin, std::string_view field) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "yes" || v == "true") return true;
    if (v == "no" || v == "false") return false;
    throw InvalidInput(fmt::format("{}: invalid header field '{}': '{}'", origin, field, s));
}

int parse_int(std::string_view s, std::string_view origin, std::string_view field) {
    try {
        std::size_t used = 0;
        const std::string str(text::trim(s));
        const int v = std::stoi(str, &used);
        if (used != str.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(fmt::format("{}: invalid header field '{}': '{}'", origin, field, s));
    }
}

}  // namespace

Scenario parse_scenario(std::string_view contents, std::string_view origin) {
    std::map<std::string, std::string> header;
    std::size_t pos = 0;
    bool terminated = false;
    while (pos < contents.size()) {
        auto eol = contents.find('\n', pos);
        if (eol == std::string_view::npos) eol = contents.size();
        auto line = contents.substr(pos, eol - pos);
        pos = eol + 1;
        if (text::trim(line).empty()) {
            terminated = true;
            break;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw InvalidInput(fmt::format("{}: malformed header line '{}'", origin, line));
        }
        header[text::to_lower(text::trim(line.substr(0, colon)))] =
            std::string(text::trim(line.substr(colon + 1)));
    }
    if (!terminated) {
        throw InvalidInput(fmt::format("{}: header not terminated by a blank line", origin));
    }
    auto field = [&](const char* key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end() || it->second.empty()) {
            throw InvalidInput(fmt::format("{}: missing header field '{}'", origin, key));
        }
        return it->second;
    };

    Scenario s;
    s.id = field("id");
    s.age = parse_int(field("age"), origin, "age");
    s.asa_class = parse_int(field("asa_class"), origin, "asa_class");
    try {
        s.surgery_risk = parse_surgery_risk(field("surgery_risk"));
    } catch (const InvalidInput&) {
        throw InvalidInput(fmt::format("{}: invalid header field 'surgery_risk'", origin));
    }
    s.investigations_abnormal =
        parse_flag(field("investigations_abnormal"), origin, "investigations_abnormal");
    s.complication_risk_high =
        parse_flag(field("complication_risk_high"), origin, "complication_risk_high");
    s.free_text = std::string(pos < contents.size() ? contents.substr(pos) : std::string_view{});
    while (!s.free_text.empty() && (s.free_text.back() == '\n' || s.free_text.back() == '\r')) {
        s.free_text.pop_back();
    }
    s.validate();
    return s;
}

std::vector<Scenario> load_scenarios(const fs::path& directory) {
    if (!fs::is_directory(directory)) {
        throw InvalidInput(fmt::format("scenario directory '{}' does not exist", directory.string()));
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && !entry.path().filename().string().starts_with(".")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    std::set<std::string> ids;
    for (const auto& f : files) {
        auto s = parse_scenario(slurp(f), f.string());
        if (!ids.insert(s.id).second) {
            throw InvalidInput(fmt::format("duplicate scenario id '{}'", s.id));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<AnswerKey> load_answer_keys(const fs::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
    }
    std::vector<AnswerKey> keys;
    std::set<std::string> ids;
    for (const auto& item : doc.at("keys")) {
        AnswerKey k;
        try {
            k = item.get<AnswerKey>();
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
        }
        k.validate();
        if (!ids.insert(k.scenario_id).second) {
            throw InvalidInput(fmt::format("duplicate answer key for scenario '{}'", k.scenario_id));
        }
        keys.push_back(std::move(k));
    }
    return keys;
}

}  // namespace preop
