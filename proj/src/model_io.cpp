#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "learners_impl.hpp"

namespace ghost2 {

namespace {

constexpr char kMagic[4] = {'G', 'H', '2', 'M'};
constexpr std::uint8_t kVersion = 1;

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

void put_i64(std::ostream& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_string(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint8_t get_u8(std::istream& in) {
    const int c = in.get();
    if (c < 0) throw Error(ErrorCode::BadFormat, "model: truncated file");
    return static_cast<std::uint8_t>(c);
}

std::uint64_t get_u64(std::istream& in) {
    char buf[8];
    if (!in.read(buf, 8)) throw Error(ErrorCode::BadFormat, "model: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

// element counts read from the wire; reject nonsense before allocating
std::size_t get_count(std::istream& in) {
    const std::uint64_t v = get_u64(in);
    if (v > 100'000'000ULL)
        throw Error(ErrorCode::BadFormat, "model: implausible element count");
    return static_cast<std::size_t>(v);
}

std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string get_string(std::istream& in) {
    const std::uint64_t len = get_count(in);
    std::string s(len, '\0');
    if (len > 0 && !in.read(s.data(), static_cast<std::streamsize>(len)))
        throw Error(ErrorCode::BadFormat, "model: truncated file");
    return s;
}

void put_matrix(std::ostream& out, const Matrix& m) {
    put_u64(out, m.rows);
    put_u64(out, m.cols);
    for (double v : m.vals) put_f64(out, v);
}

Matrix get_matrix(std::istream& in) {
    Matrix m;
    m.rows = get_count(in);
    m.cols = get_count(in);
    if (m.cols != 0 && m.rows > 100'000'000ULL / m.cols)
        throw Error(ErrorCode::BadFormat, "model: implausible matrix size");
    m.vals.resize(m.rows * m.cols);
    for (double& v : m.vals) v = get_f64(in);
    return m;
}

void put_tree(std::ostream& out, const DTreeModel& tree) {
    put_u64(out, tree.width);
    put_u64(out, tree.nodes.size());
    for (const TreeNode& n : tree.nodes) {
        put_i64(out, n.feature);
        put_f64(out, n.threshold);
        put_i64(out, n.left);
        put_i64(out, n.right);
        put_f64(out, n.score);
    }
}

DTreeModel get_tree(std::istream& in) {
    DTreeModel tree;
    tree.width = get_count(in);
    tree.nodes.resize(get_count(in));
    for (TreeNode& n : tree.nodes) {
        n.feature = static_cast<int>(get_i64(in));
        n.threshold = get_f64(in);
        n.left = static_cast<long>(get_i64(in));
        n.right = static_cast<long>(get_i64(in));
        n.score = get_f64(in);
    }
    return tree;
}

}  // namespace

void FfnetModel::save_payload(std::ostream& out) const {
    put_u64(out, layer_sizes.size());
    for (std::size_t s : layer_sizes) put_u64(out, s);
    put_f64(out, weight0);
    put_f64(out, weight1);
    put_u64(out, params.size());
    for (double v : params) put_f64(out, v);
}

void ConstantModel::save_payload(std::ostream& out) const {
    put_f64(out, score);
    put_u64(out, width);
}

void LogitModel::save_payload(std::ostream& out) const {
    put_string(out, penalty);
    put_f64(out, C);
    put_f64(out, b);
    put_u64(out, w.size());
    for (double v : w) put_f64(out, v);
}

void DTreeModel::save_payload(std::ostream& out) const { put_tree(out, *this); }

void RForestModel::save_payload(std::ostream& out) const {
    put_u64(out, width);
    put_u64(out, trees.size());
    for (const DTreeModel& t : trees) put_tree(out, t);
}

void SvmModel::save_payload(std::ostream& out) const {
    put_string(out, kernel);
    put_f64(out, gamma);
    put_f64(out, bias);
    put_u64(out, dual_coef.size());
    for (double v : dual_coef) put_f64(out, v);
    put_matrix(out, support);
}

void save_model(const Model& model, std::ostream& out) {
    out.write(kMagic, 4);
    put_u8(out, kVersion);
    put_u8(out, static_cast<std::uint8_t>(model.kind()));
    put_i64(out, model.meta.epochs);
    put_f64(out, model.meta.final_loss);
    put_u8(out, model.meta.warning ? 1 : 0);
    model.save_payload(out);
    if (!out) throw Error(ErrorCode::Io, "model: write failed");
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "model: cannot write " + path);
    save_model(model, out);
}

std::unique_ptr<Model> load_model(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw Error(ErrorCode::BadFormat, "model: bad magic header");
    const std::uint8_t version = get_u8(in);
    if (version != kVersion)
        throw Error(ErrorCode::BadFormat, "model: unsupported version " + std::to_string(version));
    const auto kind = static_cast<LearnerKind>(get_u8(in));
    ModelMeta meta;
    meta.epochs = static_cast<int>(get_i64(in));
    meta.final_loss = get_f64(in);
    meta.warning = get_u8(in) != 0;

    std::unique_ptr<Model> model;
    switch (kind) {
        case LearnerKind::FeedForward: {
            auto m = std::make_unique<FfnetModel>();
            m->layer_sizes.resize(get_count(in));
            for (std::size_t& s : m->layer_sizes) s = get_u64(in);
            m->weight0 = get_f64(in);
            m->weight1 = get_f64(in);
            m->params.resize(get_count(in));
            for (double& v : m->params) v = get_f64(in);
            model = std::move(m);
            break;
        }
        case LearnerKind::Constant: {
            auto m = std::make_unique<ConstantModel>();
            m->score = get_f64(in);
            m->width = get_u64(in);
            model = std::move(m);
            break;
        }
        case LearnerKind::Logit: {
            auto m = std::make_unique<LogitModel>();
            m->penalty = get_string(in);
            m->C = get_f64(in);
            m->b = get_f64(in);
            m->w.resize(get_count(in));
            for (double& v : m->w) v = get_f64(in);
            model = std::move(m);
            break;
        }
        case LearnerKind::DTree: {
            model = std::make_unique<DTreeModel>(get_tree(in));
            break;
        }
        case LearnerKind::RForest: {
            auto m = std::make_unique<RForestModel>();
            m->width = get_u64(in);
            m->trees.resize(get_count(in));
            for (DTreeModel& t : m->trees) t = get_tree(in);
            model = std::move(m);
            break;
        }
        case LearnerKind::Svm: {
            auto m = std::make_unique<SvmModel>();
            m->kernel = get_string(in);
            m->gamma = get_f64(in);
            m->bias = get_f64(in);
            m->dual_coef.resize(get_count(in));
            for (double& v : m->dual_coef) v = get_f64(in);
            m->support = get_matrix(in);
            model = std::move(m);
            break;
        }
        default:
            throw Error(ErrorCode::BadFormat, "model: unknown learner kind");
    }
    model->meta = meta;
    return model;
}

std::unique_ptr<Model> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "model: cannot open " + path);
    return load_model(in);
}

}  // namespace ghost2
