#include "polyalign/repspace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <set>
#include <thread>

#include <Eigen/Dense>

namespace polyalign::rep {

void LayerDump::validate() const {
    records.validate();
    for (const auto& r : records.records) {
        if (r.layer.value_or(0) != layer_index)
            throw InputError("layer dump " + std::to_string(layer_index) + " holds a record of layer " +
                             std::to_string(r.layer.value_or(0)));
    }
    if (languages().size() < 2) throw InputError("layer " + std::to_string(layer_index) + " needs at least two languages");
}

std::vector<LangCode> LayerDump::languages() const {
    std::set<LangCode> langs;
    for (const auto& r : records.records) langs.insert(r.lang);
    return {langs.begin(), langs.end()};
}

std::vector<LayerDump> split_layers(const EmbeddingDump& dump) {
    std::map<int64_t, LayerDump> layers;
    for (const auto& r : dump.records) {
        const int64_t layer = r.layer.value_or(0);
        if (layer < 0) throw InputError("negative layer index " + std::to_string(layer));
        auto& ld = layers[layer];
        ld.layer_index = layer;
        ld.records.records.push_back(r);
    }
    std::vector<LayerDump> out;
    for (auto& [_, ld] : layers) out.push_back(std::move(ld));
    return out;
}

AlignmentScore alignment_score(const LayerDump& dump, const LangCode& pivot) {
    AlignmentScore score;
    score.pivot = pivot;
    const auto pivot_vecs = dump.records.by_id(pivot);
    if (pivot_vecs.empty()) throw InputError("pivot language " + pivot.str() + " is absent from the layer dump");
    double total = 0.0;
    for (const auto& lang : dump.languages()) {
        if (lang == pivot) continue;
        double sum = 0.0;
        int64_t shared = 0;
        for (const auto& [id, vec] : dump.records.by_id(lang)) {
            const auto it = pivot_vecs.find(id);
            if (it == pivot_vecs.end()) continue;
            sum += cosine(vec, it->second);
            ++shared;
        }
        if (shared == 0) throw InputError("no sentence ids shared between " + lang.str() + " and " + pivot.str());
        score.per_lang[lang] = sum / static_cast<double>(shared);
        score.shared_ids[lang] = shared;
        total += score.per_lang[lang];
    }
    if (score.per_lang.empty()) throw InputError("layer dump has no language besides the pivot");
    score.overall = total / static_cast<double>(score.per_lang.size());
    return score;
}

double separability(const LayerDump& dump, int k) {
    if (k < 1) throw InputError("separability needs k >= 1");
    const auto& recs = dump.records.records;
    std::map<LangCode, int64_t> per_lang;
    for (const auto& r : recs) ++per_lang[r.lang];
    if (per_lang.size() < 2) throw InputError("separability needs at least two languages");
    for (const auto& [lang, n] : per_lang) {
        if (n < k + 1)
            throw InputError("separability with k=" + std::to_string(k) + " needs at least " + std::to_string(k + 1) +
                             " records of " + lang.str() + ", found " + std::to_string(n));
    }

    const size_t n = recs.size();
    std::vector<double> norms(n);
    for (size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : recs[i].vector) s += v * v;
        if (s == 0.0) throw DomainError("zero-norm embedding " + recs[i].lang.str() + "/" + std::to_string(recs[i].sentence_id));
        norms[i] = std::sqrt(s);
    }

    struct Neighbour {
        double dist;
        size_t index;
    };
    const auto before = [&](const Neighbour& a, const Neighbour& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (recs[a.index].sentence_id != recs[b.index].sentence_id)
            return recs[a.index].sentence_id < recs[b.index].sentence_id;
        return recs[a.index].lang < recs[b.index].lang;
    };

    int64_t correct = 0;
    std::vector<Neighbour> nb;
    for (size_t i = 0; i < n; ++i) {
        nb.clear();
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double dot = 0.0;
            for (size_t t = 0; t < recs[i].vector.size(); ++t) dot += recs[i].vector[t] * recs[j].vector[t];
            nb.push_back({1.0 - dot / (norms[i] * norms[j]), j});
        }
        std::partial_sort(nb.begin(), nb.begin() + k, nb.end(), before);
        std::map<LangCode, int> votes;
        for (int t = 0; t < k; ++t) ++votes[recs[nb[t].index].lang];
        // map order makes the first maximum the smallest language code
        const auto best = std::max_element(votes.begin(), votes.end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
        if (best->first == recs[i].lang) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

namespace {

void orient(Eigen::VectorXd& axis) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < axis.size(); ++i) {
        if (std::abs(axis[i]) > std::abs(axis[arg])) arg = i;
    }
    if (axis[arg] < 0) axis = -axis;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

}  // namespace

Projection project_2d(const LayerDump& dump) {
    const auto& recs = dump.records.records;
    const auto n = static_cast<Eigen::Index>(recs.size());
    const auto d = static_cast<Eigen::Index>(dump.records.dimension());
    if (n < 2) throw InputError("projection needs at least two records");
    if (d < 2) throw InputError("projection needs dimension at least 2");

    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = recs[i].vector[j];
    }

    Projection proj;
    proj.points.reserve(recs.size());
    bool identical = true;
    for (Eigen::Index i = 1; i < n && identical; ++i) identical = x.row(i) == x.row(0);
    if (identical) {
        proj.degenerate = true;
        proj.axis_1.assign(d, 0.0);
        proj.axis_2.assign(d, 0.0);
        for (const auto& r : recs) proj.points.push_back({r.lang, r.sentence_id, 0.0, 0.0});
        return proj;
    }

    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const double denom = static_cast<double>(n - 1);

    Eigen::VectorXd a1(d);
    Eigen::VectorXd a2(d);
    double l1 = 0.0;
    double l2 = 0.0;
    if (d <= n) {
        const Eigen::MatrixXd cov = (x.transpose() * x) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        a1 = es.eigenvectors().col(d - 1);
        a2 = es.eigenvectors().col(d - 2);
        l1 = es.eigenvalues()[d - 1];
        l2 = es.eigenvalues()[d - 2];
    } else {
        // more dimensions than points: eigenvectors of the Gram matrix
        const Eigen::MatrixXd gram = x * x.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const double g1 = es.eigenvalues()[n - 1];
        const double g2 = es.eigenvalues()[n - 2];
        a1 = x.transpose() * es.eigenvectors().col(n - 1) / std::sqrt(g1);
        a2 = g2 > g1 * 1e-14 ? Eigen::VectorXd(x.transpose() * es.eigenvectors().col(n - 2) / std::sqrt(g2))
                             : Eigen::VectorXd::Zero(d);
        l1 = g1 / denom;
        l2 = std::max(g2, 0.0) / denom;
    }
    orient(a1);
    orient(a2);
    const bool flat = l2 <= l1 * 1e-14;
    const Eigen::VectorXd px = x * a1;
    const Eigen::VectorXd py = flat ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(x * a2);
    for (Eigen::Index i = 0; i < n; ++i) proj.points.push_back({recs[i].lang, recs[i].sentence_id, px[i], py[i]});
    proj.axis_1 = to_std(a1);
    proj.axis_2 = to_std(a2);
    proj.variance_1 = l1;
    proj.variance_2 = std::max(l2, 0.0);
    return proj;
}

void write_projection_tsv(std::ostream& out, const Projection& projection) {
    out << "lang\tsentence_id\tx\ty\n";
    char buf[64];
    for (const auto& p : projection.points) {
        out << p.lang.str() << '\t' << p.sentence_id;
        std::snprintf(buf, sizeof buf, "\t%.17g", p.x);
        out << buf;
        std::snprintf(buf, sizeof buf, "\t%.17g\n", p.y);
        out << buf;
    }
}

std::vector<LayerReport> analyze_layers(const EmbeddingDump& dump, const LangCode& pivot, int k, unsigned workers) {
    auto layers = split_layers(dump);
    if (layers.empty()) throw InputError("embedding dump is empty");
    for (const auto& l : layers) l.validate();

    std::vector<LayerReport> reports(layers.size());
    std::vector<std::exception_ptr> errors(layers.size());
    std::atomic<size_t> next{0};
    const auto work = [&] {
        for (size_t i = next++; i < layers.size(); i = next++) {
            try {
                auto& r = reports[i];
                r.layer_index = layers[i].layer_index;
                r.alignment = alignment_score(layers[i], pivot);
                r.k = k;
                r.separability = separability(layers[i], k);
                r.projection = project_2d(layers[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(layers.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return reports;
}

nlohmann::json to_json(const LayerReport& r) {
    nlohmann::json per_lang = nlohmann::json::object();
    for (const auto& [lang, v] : r.alignment.per_lang)
        per_lang[lang.str()] = {{"mean_cosine", v}, {"shared_ids", r.alignment.shared_ids.at(lang)}};
    return {{"layer", r.layer_index},
            {"alignment", {{"pivot", r.alignment.pivot.str()}, {"per_lang", per_lang}, {"overall", r.alignment.overall}}},
            {"separability", {{"k", r.k}, {"accuracy", r.separability}}},
            {"projection",
             {{"degenerate", r.projection.degenerate},
              {"variance", {r.projection.variance_1, r.projection.variance_2}},
              {"points", r.projection.points.size()}}}};
}

}  // namespace polyalign::rep
