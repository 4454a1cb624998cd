#include "sfegacn/data_io.hpp"

#include "sfegacn/config_text.hpp"
#include "sfegacn/error.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sfegacn {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'E', 'G'};
constexpr unsigned char kVersion = 1;

// --- CSV ------------------------------------------------------------------

/// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw DataError("csv line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_escape(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

struct ParsedCsv {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> feature_rows;
    std::vector<std::string> labels;
    std::vector<bool> generated;
};

ParsedCsv parse_csv(const std::filesystem::path& path,
                    const std::optional<std::string>& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open csv file: " + path.string());

    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw DataError("csv file has no header row: " + path.string());

    const auto header = split_csv_line(line, 1);
    std::ptrdiff_t label_idx = -1;
    std::ptrdiff_t generated_idx = -1;
    ParsedCsv out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (label_column && header[c] == *label_column) {
            label_idx = static_cast<std::ptrdiff_t>(c);
        } else if (header[c] == "generated") {
            generated_idx = static_cast<std::ptrdiff_t>(c);
        } else {
            out.feature_names.push_back(header[c]);
        }
    }
    if (label_column && label_idx < 0)
        throw DataError("csv file " + path.string() + ": no column named '" + *label_column + "'");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != header.size())
            throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));

        std::vector<double> row;
        row.reserve(out.feature_names.size());
        std::string label = kUnlabeled;
        bool was_generated = false;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (static_cast<std::ptrdiff_t>(c) == label_idx) {
                label = fields[c];
                continue;
            }
            if (static_cast<std::ptrdiff_t>(c) == generated_idx) {
                was_generated = fields[c] == "1" || fields[c] == "true";
                continue;
            }
            const auto value = parse_double(fields[c]);
            if (!value || !std::isfinite(*value))
                throw DataError("csv line " + std::to_string(line_no) + ", column '" + header[c] +
                                "': not a finite number: '" + fields[c] + "'");
            row.push_back(*value);
        }
        out.feature_rows.push_back(std::move(row));
        out.labels.push_back(label.empty() ? kUnlabeled : label);
        out.generated.push_back(was_generated);
    }
    return out;
}

// --- binary helpers ---------------------------------------------------------

void write_u32(std::ostream& out, std::uint32_t value) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& context) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4))
        throw DataError("model container truncated: " + context);
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return value;
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        unsigned char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

std::vector<double> read_doubles(std::istream& in, std::size_t count, const std::string& context) {
    std::vector<double> values(count);
    for (std::size_t k = 0; k < count; ++k) {
        unsigned char bytes[8];
        if (!in.read(reinterpret_cast<char*>(bytes), 8))
            throw DataError("model container truncated: " + context);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        std::memcpy(&values[k], &bits, sizeof(double));
    }
    return values;
}

// --- container manifest helpers --------------------------------------------

struct ArrayDecl {
    std::string name;
    std::size_t length = 0;
};

std::string declare_arrays(const std::vector<ArrayDecl>& arrays) {
    std::string out;
    for (const auto& a : arrays) {
        if (!out.empty()) out += ",";
        out += a.name + ":" + std::to_string(a.length);
    }
    return out;
}

std::vector<ArrayDecl> parse_array_decls(const ConfigText& manifest) {
    std::vector<ArrayDecl> arrays;
    for (const auto& item : manifest.get_list("arrays")) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos)
            throw DataError("model container: malformed array declaration '" + item + "'");
        ArrayDecl decl;
        decl.name = item.substr(0, colon);
        try {
            decl.length = std::stoull(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw DataError("model container: malformed array length in '" + item + "'");
        }
        arrays.push_back(std::move(decl));
    }
    return arrays;
}

void write_container(const std::filesystem::path& path, const ConfigText& manifest,
                     const std::vector<std::vector<double>>& arrays) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    const std::string text = manifest.serialize();
    write_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& a : arrays) write_doubles(out, a);
    if (!out) throw IoError("write failed: " + path.string());
}

struct Container {
    ConfigText manifest;
    std::vector<std::vector<double>> arrays;
};

Container read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path.string());

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a model container (bad magic): " + path.string());
    const int version = in.get();
    if (version == EOF) throw DataError("model container truncated: version byte");
    if (version != kVersion)
        throw DataError("model container version " + std::to_string(version) +
                        " not supported; this build reads version " + std::to_string(kVersion));

    const std::uint32_t manifest_len = read_u32(in, "manifest length");
    std::string text(manifest_len, '\0');
    if (!in.read(text.data(), manifest_len))
        throw DataError("model container truncated: manifest");

    Container container;
    try {
        container.manifest = ConfigText::parse(text);
    } catch (const ConfigError& e) {
        throw DataError(std::string("model container manifest: ") + e.what());
    }
    for (const auto& decl : parse_array_decls(container.manifest))
        container.arrays.push_back(read_doubles(in, decl.length, "array " + decl.name));
    if (in.peek() != EOF)
        throw DataError("model container has trailing bytes: " + path.string());
    return container;
}

// Dense nets nest inside larger containers under a key prefix.
void manifest_put_net(ConfigText& manifest, const std::string& prefix, const DenseNet& net,
                      std::vector<ArrayDecl>& arrays, std::vector<std::vector<double>>& payload) {
    std::string dims, acts;
    for (std::size_t d : net.layer_dims()) {
        if (!dims.empty()) dims += ",";
        dims += std::to_string(d);
    }
    for (Activation a : net.activations()) {
        if (!acts.empty()) acts += ",";
        acts += activation_name(a);
    }
    manifest.set(prefix + "dims", dims);
    manifest.set(prefix + "activations", acts);
    manifest.set_uint(prefix + "seed", net.seed());
    arrays.push_back({prefix + "params", net.parameter_count()});
    payload.push_back(snapshot(net).values);
}

DenseNet manifest_get_net(const ConfigText& manifest, const std::string& prefix,
                          const std::vector<double>& params) {
    std::vector<std::size_t> dims;
    for (const auto& d : manifest.get_list(prefix + "dims")) dims.push_back(std::stoull(d));
    std::vector<Activation> acts;
    for (const auto& a : manifest.get_list(prefix + "activations"))
        acts.push_back(activation_from_name(a));
    DenseNet net;
    try {
        net = DenseNet(dims, acts, manifest.get_uint(prefix + "seed", 0));
    } catch (const ConfigError& e) {
        throw DataError(std::string("model container: invalid net layout: ") + e.what());
    }
    ParamSnapshot snap;
    snap.layer_dims = dims;
    snap.values = params;
    if (snap.values.size() != net.parameter_count())
        throw DataError("model container: parameter array length does not match dims");
    restore(net, snap);
    return net;
}

} // namespace

// --- CSV entry points -------------------------------------------------------

SessionFeatureSet load_csv(const std::filesystem::path& path,
                           const std::optional<std::string>& label_column) {
    ParsedCsv parsed = parse_csv(path, label_column);
    SessionFeatureSet set;
    set.column_names = std::move(parsed.feature_names);
    set.features = Matrix::from_rows(parsed.feature_rows);
    set.labels = std::move(parsed.labels);
    set.source = path.string();
    if (set.features.rows() == 0) throw DataError("csv file has no data rows: " + path.string());
    return set;
}

void save_csv(const std::filesystem::path& path, const SessionFeatureSet& set,
              const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    for (std::size_t c = 0; c < set.column_names.size(); ++c) {
        if (c > 0) out << ',';
        out << csv_escape(set.column_names[c]);
    }
    out << (set.column_names.empty() ? "" : ",") << label_column << '\n';
    for (std::size_t r = 0; r < set.rows(); ++r) {
        for (std::size_t c = 0; c < set.feature_count(); ++c) out << format_double(set.features(r, c)) << ',';
        out << csv_escape(set.labels[r]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

EmbeddedSet load_embedded_csv(const std::filesystem::path& path, const std::string& label_column) {
    const SessionFeatureSet raw = load_csv(path, label_column);
    ParsedCsv parsed = parse_csv(path, label_column); // cheap at desk scale
    EmbeddedSet set;
    set.matrix = raw.features;
    set.labels = raw.labels;
    set.generated = std::move(parsed.generated);
    return set;
}

void save_embedded_csv(const std::filesystem::path& path, const EmbeddedSet& set,
                       const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    const bool any_generated =
        std::find(set.generated.begin(), set.generated.end(), true) != set.generated.end();
    for (std::size_t c = 0; c < set.dim(); ++c) out << 'e' << c << ',';
    out << label_column;
    if (any_generated) out << ",generated";
    out << '\n';
    for (std::size_t r = 0; r < set.rows(); ++r) {
        for (std::size_t c = 0; c < set.dim(); ++c) out << format_double(set.matrix(r, c)) << ',';
        out << csv_escape(set.labels[r]);
        if (any_generated) out << ',' << (set.generated[r] ? 1 : 0);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

// --- synthetic data ----------------------------------------------------------

void SynthConfig::validate() const {
    if (classes.empty()) throw ConfigError("synth: no classes configured");
    const std::size_t dim = classes.front().mean.size();
    if (dim == 0) throw ConfigError("synth: zero-dimensional class mean");
    if (overlap < 0.0) throw ConfigError("synth: overlap must be non-negative");
    for (const auto& cls : classes) {
        if (cls.count == 0) throw ConfigError("synth: class '" + cls.label + "' has zero count");
        if (cls.mean.size() != dim || cls.variance.size() != dim)
            throw ConfigError("synth: class '" + cls.label + "' has inconsistent dimensions");
        for (double v : cls.variance)
            if (v < 0.0) throw ConfigError("synth: negative variance in class '" + cls.label + "'");
    }
}

SessionFeatureSet synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t dim = cfg.classes.front().mean.size();

    // Pull class means toward the pooled mean by 1/(1+overlap).
    std::vector<double> center(dim, 0.0);
    for (const auto& cls : cfg.classes)
        for (std::size_t c = 0; c < dim; ++c) center[c] += cls.mean[c];
    for (double& v : center) v /= static_cast<double>(cfg.classes.size());
    const double shrink = 1.0 / (1.0 + cfg.overlap);

    std::size_t total = 0;
    for (const auto& cls : cfg.classes) total += cls.count;

    SessionFeatureSet set;
    set.features = Matrix(total, dim);
    set.labels.reserve(total);
    set.column_names.reserve(dim);
    for (std::size_t c = 0; c < dim; ++c) set.column_names.push_back("f" + std::to_string(c));
    set.source = "synthetic";

    std::size_t row = 0;
    for (const auto& cls : cfg.classes) {
        RngStream rng(derive_seed(cfg.seed, "synth:" + cls.label));
        for (std::size_t i = 0; i < cls.count; ++i, ++row) {
            for (std::size_t c = 0; c < dim; ++c) {
                const double mean = center[c] + (cls.mean[c] - center[c]) * shrink;
                set.features(row, c) = mean + std::sqrt(cls.variance[c]) * rng.normal();
            }
            set.labels.push_back(cls.label);
        }
    }
    return set;
}

// --- subsampling --------------------------------------------------------------

namespace {

SessionFeatureSet take_rows(const SessionFeatureSet& set, const std::vector<std::size_t>& rows) {
    SessionFeatureSet out;
    out.features = set.features.gather_rows(rows);
    out.column_names = set.column_names;
    out.source = set.source;
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(set.labels[r]);
    return out;
}

SessionFeatureSet subsample_impl(const SessionFeatureSet& set, std::uint64_t seed,
                                 const std::function<std::size_t(std::size_t)>& keep_of) {
    // Group row ids by label, preserving first-appearance label order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < set.rows(); ++r) {
        if (groups.find(set.labels[r]) == groups.end()) order.push_back(set.labels[r]);
        groups[set.labels[r]].push_back(r);
    }

    std::vector<std::size_t> chosen;
    for (const auto& label : order) {
        const auto& rows = groups[label];
        const std::size_t keep = keep_of(rows.size());
        if (keep > rows.size())
            throw ConfigError("subsample: label '" + label + "' has " +
                              std::to_string(rows.size()) + " rows, requested " +
                              std::to_string(keep));
        RngStream rng(derive_seed(seed, "subsample:" + label));
        for (std::size_t pick : rng.sample_without_replacement(rows.size(), keep))
            chosen.push_back(rows[pick]);
    }
    std::sort(chosen.begin(), chosen.end());
    return take_rows(set, chosen);
}

} // namespace

SessionFeatureSet subsample_rate(const SessionFeatureSet& set, double rate, std::uint64_t seed) {
    if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("subsample: rate must lie in (0,1]");
    return subsample_impl(set, seed, [rate](std::size_t n) {
        return static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    });
}

SessionFeatureSet subsample_count(const SessionFeatureSet& set, std::size_t per_label,
                                  std::uint64_t seed) {
    return subsample_impl(set, seed, [per_label](std::size_t) { return per_label; });
}

// --- model containers ----------------------------------------------------------

void save_model(const std::filesystem::path& path, const DenseNet& net) {
    ConfigText manifest;
    manifest.set("kind", "dense-net");
    std::vector<ArrayDecl> arrays;
    std::vector<std::vector<double>> payload;
    manifest_put_net(manifest, "net.", net, arrays, payload);
    manifest.set("arrays", declare_arrays(arrays));
    write_container(path, manifest, payload);
}

void save_model(const std::filesystem::path& path, const EmbeddingModel& model) {
    ConfigText manifest;
    manifest.set("kind", "embedding-model");
    manifest.set_uint("features", model.feature_count());
    manifest.set_uint("embedding_dim", model.embedding_dim);
    manifest.set_uint("window", model.window);
    std::vector<ArrayDecl> arrays;
    std::vector<std::vector<double>> payload;
    for (std::size_t i = 0; i < model.feature_count(); ++i) {
        const std::string prefix = "feature." + std::to_string(i) + ".";
        manifest.set(prefix + "name",
                     i < model.column_names.size() ? model.column_names[i] : "");
        manifest.set_uint(prefix + "bits", model.bit_widths.widths[i]);
        manifest.set_double(prefix + "offset", model.quantizers[i].offset);
        manifest.set_double(prefix + "scale", model.quantizers[i].scale);
        arrays.push_back({"projection" + std::to_string(i), model.projections[i].data().size()});
        payload.push_back(model.projections[i].data());
    }
    manifest.set("arrays", declare_arrays(arrays));
    write_container(path, manifest, payload);
}

void save_model(const std::filesystem::path& path, const GacnModels& models) {
    ConfigText manifest;
    manifest.set("kind", "gacn-models");
    manifest.set("target_label", models.target_label);
    manifest.set_uint("data_dim", models.data_dim);
    manifest.set_uint("noise_dim", models.noise_dim);
    manifest.set("noise_mode", noise_mode_name(models.noise_mode));
    std::vector<ArrayDecl> arrays;
    std::vector<std::vector<double>> payload;
    manifest_put_net(manifest, "generator.", models.generator, arrays, payload);
    manifest_put_net(manifest, "d_adv.", models.d_adv, arrays, payload);
    manifest_put_net(manifest, "d_coo.", models.d_coo, arrays, payload);
    arrays.push_back({"backup", models.backup.values.size()});
    payload.push_back(models.backup.values);
    if (models.noise_mode == NoiseMode::SidePlusNoise) {
        manifest.set_uint("side_rows", models.side_rows.rows());
        arrays.push_back({"side", models.side_rows.data().size()});
        payload.push_back(models.side_rows.data());
    }
    manifest.set("arrays", declare_arrays(arrays));
    write_container(path, manifest, payload);
}

std::string peek_model_kind(const std::filesystem::path& path) {
    return read_container(path).manifest.require("kind");
}

namespace {

void require_kind(const ConfigText& manifest, const std::string& expected,
                  const std::filesystem::path& path) {
    const std::string kind = manifest.get_or("kind", "?");
    if (kind != expected)
        throw DataError("model container " + path.string() + " holds '" + kind + "', expected '" +
                        expected + "'");
}

} // namespace

DenseNet load_dense_net(const std::filesystem::path& path) {
    const Container c = read_container(path);
    require_kind(c.manifest, "dense-net", path);
    return manifest_get_net(c.manifest, "net.", c.arrays.at(0));
}

EmbeddingModel load_embedding_model(const std::filesystem::path& path) {
    const Container c = read_container(path);
    require_kind(c.manifest, "embedding-model", path);
    EmbeddingModel model;
    model.embedding_dim = c.manifest.get_uint("embedding_dim", 0);
    model.window = c.manifest.get_uint("window", 0);
    const std::size_t features = c.manifest.get_uint("features", 0);
    if (c.arrays.size() != features)
        throw DataError("model container: expected one projection per feature");
    for (std::size_t i = 0; i < features; ++i) {
        const std::string prefix = "feature." + std::to_string(i) + ".";
        model.column_names.push_back(c.manifest.get_or(prefix + "name", ""));
        const std::size_t bits = c.manifest.get_uint(prefix + "bits", 0);
        if (bits == 0) throw DataError("model container: missing bit width for feature " +
                                       std::to_string(i));
        model.bit_widths.widths.push_back(bits);
        model.quantizers.push_back({c.manifest.get_double(prefix + "offset", 0.0),
                                    c.manifest.get_double(prefix + "scale", 1.0)});
        if (c.arrays[i].size() % bits != 0)
            throw DataError("model container: projection array for feature " + std::to_string(i) +
                            " does not match its bit width");
        Matrix projection(bits, c.arrays[i].size() / bits);
        projection.data() = c.arrays[i];
        if (projection.cols() != model.embedding_dim)
            throw DataError("model container: projection width does not match embedding_dim");
        model.projections.push_back(std::move(projection));
    }
    return model;
}

GacnModels load_gacn_models(const std::filesystem::path& path) {
    const Container c = read_container(path);
    require_kind(c.manifest, "gacn-models", path);
    GacnModels models;
    models.target_label = c.manifest.get_or("target_label", "");
    models.data_dim = c.manifest.get_uint("data_dim", 0);
    models.noise_dim = c.manifest.get_uint("noise_dim", 0);
    models.noise_mode = noise_mode_from_name(c.manifest.get_or("noise_mode", "gaussian"));
    models.generator = manifest_get_net(c.manifest, "generator.", c.arrays.at(0));
    models.d_adv = manifest_get_net(c.manifest, "d_adv.", c.arrays.at(1));
    models.d_coo = manifest_get_net(c.manifest, "d_coo.", c.arrays.at(2));
    models.backup.layer_dims = models.generator.layer_dims();
    models.backup.values = c.arrays.at(3);
    if (models.backup.values.size() != models.generator.parameter_count())
        throw DataError("model container: backup length does not match generator");
    if (models.noise_mode == NoiseMode::SidePlusNoise) {
        const std::size_t rows = c.manifest.get_uint("side_rows", 0);
        const auto& data = c.arrays.at(4);
        if (rows == 0 || data.size() != rows * models.data_dim)
            throw DataError("model container: side sample block is inconsistent");
        models.side_rows = Matrix(rows, models.data_dim);
        models.side_rows.data() = data;
    }
    return models;
}

} // namespace sfegacn
