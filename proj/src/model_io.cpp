#include "mmbm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmbm {

namespace {

using nlohmann::json;

double finite_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw IoError("model document: " + where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw IoError("model document: " + where + " is not finite");
    return v;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) ok = true;
        if (!ok) throw IoError("model document: unknown key \"" + it.key() + "\" in " + where);
    }
}

}  // namespace

ModelDocument parse_model_document(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw IoError(std::string("model document: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw IoError("model document: top level must be an object");
    reject_unknown(doc, {"states", "Q", "B", "x0", "q"}, "document");
    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
        throw IoError("model document: \"states\" must be a non-empty array");
    if (!doc.contains("Q") || !doc["Q"].is_array())
        throw IoError("model document: \"Q\" must be an array of rows");

    const auto& states = doc["states"];
    const int n = static_cast<int>(states.size());
    ModelDocument out;
    out.model.mu.resize(n);
    out.model.sigma2.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& st = states[static_cast<std::size_t>(i)];
        if (!st.is_object()) throw IoError("model document: each state must be an object");
        reject_unknown(st, {"label", "mu", "sigma2"}, "state");
        out.model.mu(i) = finite_number(st.at("mu"), "state mu");
        out.model.sigma2(i) = finite_number(st.at("sigma2"), "state sigma2");
        out.model.state_labels.push_back(
            st.contains("label") ? st["label"].get<std::string>()
                                 : "s" + std::to_string(i));
    }
    if (static_cast<int>(doc["Q"].size()) != n)
        throw IoError("model document: Q row count must match state count");
    out.model.Q.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = doc["Q"][static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw IoError("model document: Q must be a square matrix");
        for (int j = 0; j < n; ++j)
            out.model.Q(i, j) = finite_number(row[static_cast<std::size_t>(j)], "Q entry");
    }
    if (doc.contains("B")) out.B = finite_number(doc["B"], "B");
    if (out.B <= 0) throw IoError("model document: B must be positive");
    if (doc.contains("x0")) {
        out.x0 = finite_number(doc["x0"], "x0");
        if (*out.x0 < 0 || *out.x0 > out.B)
            throw IoError("model document: x0 must lie in [0, B]");
    }
    if (doc.contains("q")) {
        out.q = finite_number(doc["q"], "q");
        if (*out.q < 0) throw IoError("model document: q must be >= 0");
    }
    validate(out.model);
    return out;
}

ModelDocument load_model_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_document(buf.str());
}

std::string dump_model_document(const ModelDocument& doc) {
    json j;
    j["states"] = json::array();
    for (int i = 0; i < doc.model.size(); ++i) {
        j["states"].push_back({{"label", doc.model.state_labels[static_cast<std::size_t>(i)]},
                               {"mu", doc.model.mu(i)},
                               {"sigma2", doc.model.sigma2(i)}});
    }
    j["Q"] = json::array();
    for (int i = 0; i < doc.model.size(); ++i) {
        json row = json::array();
        for (int k = 0; k < doc.model.size(); ++k) row.push_back(doc.model.Q(i, k));
        j["Q"].push_back(row);
    }
    j["B"] = doc.B;
    if (doc.x0) j["x0"] = *doc.x0;
    if (doc.q) j["q"] = *doc.q;
    return j.dump(2);
}

std::string format_real(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace mmbm
