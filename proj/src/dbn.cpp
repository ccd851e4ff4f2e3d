#include "ispt/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ispt {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kDistSumTol = 1e-9;

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

std::uint64_t DynBayesNet::joint_states() const { return ipow(state_space, slice_width); }

void DynBayesNet::validate() const {
    if (horizon < 1 || slice_width < 1 || state_space < 2)
        throw std::invalid_argument("dbn: horizon/slice_width/state_space out of range");
    if (static_cast<int>(mechanisms.size()) != horizon - 1)
        throw std::invalid_argument("dbn: need one mechanism layer per non-initial slice");
    for (int t = 1; t < horizon; ++t) {
        const auto& layer = mechanisms[t - 1];
        if (static_cast<int>(layer.size()) != slice_width)
            throw std::invalid_argument("dbn: mechanism layer width mismatch");
        std::set<int> parent_union;
        for (const auto& m : layer) {
            for (int p : m.parent_sites) {
                if (p < 0 || p >= slice_width)
                    throw std::invalid_argument("dbn: parent site out of range");
                parent_union.insert(p);
            }
            const auto expected_rows = ipow(state_space, static_cast<int>(m.parent_sites.size()));
            if (m.rows.size() != expected_rows)
                throw std::invalid_argument("dbn: CPT row count mismatch");
            for (const auto& row : m.rows) {
                if (static_cast<int>(row.size()) != state_space)
                    throw std::invalid_argument("dbn: CPT row width mismatch");
                double sum = 0;
                for (double p : row) {
                    if (p < 0.0 || p > 1.0)
                        throw std::invalid_argument("dbn: probability outside [0,1]");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > kRowSumTol)
                    throw std::invalid_argument("dbn: CPT row does not sum to 1");
            }
        }
        // pa(V_{t+1}) = V_t: every slice-t site must be some node's parent.
        if (static_cast<int>(parent_union.size()) != slice_width)
            throw std::invalid_argument("dbn: parents of a slice must cover the previous slice");
    }
    double sum = 0;
    for (const auto& [state, p] : initial) {
        if (state >= joint_states()) throw std::invalid_argument("dbn: initial state out of range");
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("dbn: initial probability outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kDistSumTol)
        throw std::invalid_argument("dbn: initial distribution does not sum to 1");
}

std::uint64_t encode_slice(const DynBayesNet& net, const std::vector<int>& values) {
    if (static_cast<int>(values.size()) != net.slice_width)
        throw std::invalid_argument("dbn: slice value count mismatch");
    std::uint64_t s = 0;
    for (int i = net.slice_width - 1; i >= 0; --i) {
        if (values[i] < 0 || values[i] >= net.state_space)
            throw std::invalid_argument("dbn: value outside state space");
        s = s * net.state_space + values[i];
    }
    return s;
}

std::vector<int> decode_slice(const DynBayesNet& net, std::uint64_t state) {
    std::vector<int> values(net.slice_width);
    for (int i = 0; i < net.slice_width; ++i) {
        values[i] = static_cast<int>(state % net.state_space);
        state /= net.state_space;
    }
    return values;
}

namespace {

std::uint64_t parent_row_index(const DynBayesNet& net, const Mechanism& m,
                               const std::vector<int>& prev_slice_values) {
    std::uint64_t idx = 0;
    for (auto it = m.parent_sites.rbegin(); it != m.parent_sites.rend(); ++it)
        idx = idx * net.state_space + prev_slice_values[*it];
    return idx;
}

}  // namespace

double joint_probability(const DynBayesNet& net, const Assignment& assignment) {
    if (static_cast<int>(assignment.size()) != net.horizon)
        throw std::invalid_argument("dbn: assignment must cover every slice exactly once");
    for (const auto& slice : assignment)
        if (static_cast<int>(slice.size()) != net.slice_width)
            throw std::invalid_argument("dbn: assignment slice width mismatch");

    const auto it = net.initial.find(encode_slice(net, assignment[0]));
    double p = (it == net.initial.end()) ? 0.0 : it->second;
    for (int t = 1; t < net.horizon && p > 0.0; ++t) {
        for (int site = 0; site < net.slice_width; ++site) {
            const Mechanism& m = net.mechanisms[t - 1][site];
            const int v = assignment[t][site];
            if (v < 0 || v >= net.state_space)
                throw std::invalid_argument("dbn: value outside state space");
            p *= m.rows[parent_row_index(net, m, assignment[t - 1])][v];
        }
    }
    return p;
}

SliceDist markov_matrix_row(const DynBayesNet& net, std::uint64_t state_t, int t) {
    if (t < 0 || t + 1 >= net.horizon) throw std::invalid_argument("dbn: slice index out of range");
    if (state_t >= net.joint_states()) throw std::invalid_argument("dbn: state out of range");
    const auto prev = decode_slice(net, state_t);

    // Per-node conditional rows for this parent configuration.
    std::vector<const std::vector<double>*> rows(net.slice_width);
    for (int site = 0; site < net.slice_width; ++site) {
        const Mechanism& m = net.mechanisms[t][site];
        rows[site] = &m.rows[parent_row_index(net, m, prev)];
    }

    // Expand the product distribution, pruning zero branches. Deterministic
    // mechanisms collapse this to a single path.
    SliceDist out;
    std::vector<int> values(net.slice_width, 0);
    auto expand = [&](auto&& self, int site, double p) -> void {
        if (site == net.slice_width) {
            out[encode_slice(net, values)] += p;
            return;
        }
        for (int v = 0; v < net.state_space; ++v) {
            const double pv = (*rows[site])[v];
            if (pv == 0.0) continue;
            values[site] = v;
            self(self, site + 1, p * pv);
        }
    };
    expand(expand, 0, 1.0);
    return out;
}

SliceDist propagate(const DynBayesNet& net, const SliceDist& dist_t, int t) {
    if (t < 0 || t + 1 >= net.horizon) throw std::invalid_argument("dbn: slice index out of range");
    double sum = 0;
    for (const auto& [state, p] : dist_t) sum += p;
    if (std::abs(sum - 1.0) > kDistSumTol)
        throw std::invalid_argument("dbn: input distribution does not sum to 1");

    SliceDist out;
    for (const auto& [state, p] : dist_t) {
        if (p == 0.0) continue;
        for (const auto& [next, q] : markov_matrix_row(net, state, t)) out[next] += p * q;
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_dbn(const DynBayesNet& net, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "dbn 1\n";
    out << "horizon " << net.horizon << "\n";
    out << "slice_width " << net.slice_width << "\n";
    out << "state_space " << net.state_space << "\n";
    for (const auto& [state, p] : net.initial)
        out << "init " << state << " " << fmt_double(p) << "\n";
    for (int t = 1; t < net.horizon; ++t)
        for (int site = 0; site < net.slice_width; ++site) {
            const Mechanism& m = net.mechanisms[t - 1][site];
            out << "node " << t << " " << site << " parents";
            for (int p : m.parent_sites) out << " " << p;
            out << "\n";
            for (const auto& row : m.rows) {
                out << "row";
                for (double p : row) out << " " << fmt_double(p);
                out << "\n";
            }
        }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << out.str();
}

DynBayesNet load_dbn(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    DynBayesNet net;
    net.horizon = net.slice_width = 0;

    std::string line;
    int line_no = 0;
    Mechanism* cur = nullptr;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream in(line);
        std::string tag;
        in >> tag;
        if (tag == "dbn") {
            int version;
            if (!(in >> version) || version != 1) fail("unsupported dbn format version");
        } else if (tag == "horizon") {
            in >> net.horizon;
        } else if (tag == "slice_width") {
            in >> net.slice_width;
            net.mechanisms.assign(std::max(net.horizon - 1, 0),
                                  std::vector<Mechanism>(net.slice_width));
        } else if (tag == "state_space") {
            in >> net.state_space;
        } else if (tag == "init") {
            std::uint64_t state;
            double p;
            if (!(in >> state >> p)) fail("malformed init line");
            net.initial[state] = p;
        } else if (tag == "node") {
            int t, site;
            std::string kw;
            if (!(in >> t >> site >> kw) || kw != "parents") fail("malformed node line");
            if (t < 1 || t >= net.horizon || site < 0 || site >= net.slice_width)
                fail("node index out of range");
            cur = &net.mechanisms[t - 1][site];
            cur->parent_sites.clear();
            int p;
            while (in >> p) cur->parent_sites.push_back(p);
        } else if (tag == "row") {
            if (!cur) fail("row before any node");
            std::vector<double> row;
            double p;
            while (in >> p) row.push_back(p);
            cur->rows.push_back(std::move(row));
        } else {
            fail("unknown directive '" + tag + "'");
        }
    }
    net.validate();
    return net;
}

DynBayesNet life_dbn(GridDims dims, int horizon) {
    if (dims.cells() > 25) throw capacity_error("life_dbn limited to grids with <= 25 cells");
    DynBayesNet net;
    net.horizon = horizon;
    net.slice_width = dims.cells();
    net.state_space = 2;

    const int w = dims.width, h = dims.height;
    std::vector<Mechanism> layer(net.slice_width);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            Mechanism& m = layer[r * w + c];
            // Parents: the 3x3 toroidal neighborhood, self first.
            std::set<int> parents;
            m.parent_sites.push_back(r * w + c);
            parents.insert(r * w + c);
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const int site = ((r + dr + h) % h) * w + ((c + dc + w) % w);
                    if (parents.insert(site).second) m.parent_sites.push_back(site);
                }
            const int np = static_cast<int>(m.parent_sites.size());
            m.rows.resize(std::size_t(1) << np);
            for (std::uint64_t row = 0; row < m.rows.size(); ++row) {
                const bool alive = row & 1u;  // self is parent 0
                int count = 0;
                for (int i = 1; i < np; ++i) count += (row >> i) & 1u;
                // Degenerate tori (w or h < 3) repeat neighbor sites; weight
                // each distinct parent by how many of the 8 offsets hit it.
                if (w < 3 || h < 3) {
                    count = 0;
                    for (int dr = -1; dr <= 1; ++dr)
                        for (int dc = -1; dc <= 1; ++dc) {
                            if (dr == 0 && dc == 0) continue;
                            const int site = ((r + dr + h) % h) * w + ((c + dc + w) % w);
                            const auto it = std::find(m.parent_sites.begin(),
                                                      m.parent_sites.end(), site);
                            const int pi = static_cast<int>(it - m.parent_sites.begin());
                            count += (row >> pi) & 1u;
                        }
                }
                const bool next = (count == 3) || (alive && count == 2);
                m.rows[row] = next ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0};
            }
        }
    for (int t = 1; t < horizon; ++t) net.mechanisms.push_back(layer);

    const std::uint64_t states = net.joint_states();
    const double u = 1.0 / static_cast<double>(states);
    for (std::uint64_t s = 0; s < states; ++s) net.initial[s] = u;
    net.validate();
    return net;
}

}  // namespace ispt
