#include "meshband/dataset_io.hpp"

#include "meshband/memberships.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace meshband {

namespace {

constexpr char kMagic[4] = {'M', 'B', 'C', '1'};
constexpr std::uint32_t kFormatVersion = 1;
enum class ContainerKind : std::uint32_t { dataset = 1, stack = 2, features = 3, memberships = 4 };

// Explicit little-endian scalar IO keeps the container portable.
void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("container: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("container: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

std::string read_string(std::istream& in) {
    const std::uint32_t n = read_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw std::runtime_error("container: truncated string");
    return s;
}

void write_matrix(std::ostream& out, const Matrix& m) {
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
    }
}

Matrix read_matrix(std::istream& in, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) m(r, c) = read_f64(in);
    }
    return m;
}

std::ofstream open_for_write(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    return in;
}

void write_header(std::ostream& out, ContainerKind kind) {
    out.write(kMagic, 4);
    write_u32(out, kFormatVersion);
    write_u32(out, static_cast<std::uint32_t>(kind));
}

ContainerKind read_header(std::istream& in, const std::filesystem::path& file) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error(file.string() + ": not a meshband container");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion) {
        throw std::runtime_error(file.string() + ": unsupported container version " +
                                 std::to_string(version));
    }
    return static_cast<ContainerKind>(read_u32(in));
}

void expect_kind(ContainerKind got, ContainerKind want, const std::filesystem::path& file) {
    if (got != want) {
        throw std::runtime_error(file.string() + ": unexpected container kind");
    }
}

// ---- CSV side ----

double parse_cell(const std::string& cell, const std::filesystem::path& file, std::size_t line,
                  std::size_t column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": column " +
                                 std::to_string(column) + ": cannot parse '" + cell + "'");
    }
    if (!std::isfinite(value)) {
        throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": column " +
                                 std::to_string(column) + ": non-finite value");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

Matrix load_series_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            row.push_back(parse_cell(cells[i], file, line_no, i + 1));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": ragged row (" + std::to_string(row.size()) + " vs " +
                                     std::to_string(rows.front().size()) + " columns)");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(file.string() + ": empty matrix");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return m;
}

Dataset load_dataset_csv(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error(dir.string() + ": not a dataset directory");
    }
    const std::filesystem::path sessions_file = dir / "sessions.csv";
    std::ifstream in(sessions_file);
    if (!in) throw std::runtime_error("cannot read " + sessions_file.string());

    struct RawSession {
        int label;
        std::int64_t scans;
    };
    std::vector<std::pair<std::string, RawSession>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("subject_id", 0) == 0) continue;  // header
        const auto cells = split_csv_line(line);
        if (cells.size() != 3) {
            throw std::runtime_error(sessions_file.string() + ":" + std::to_string(line_no) +
                                     ": expected subject_id,task_label,n_scans");
        }
        RawSession s{};
        s.label = static_cast<int>(parse_cell(cells[1], sessions_file, line_no, 2));
        s.scans = static_cast<std::int64_t>(parse_cell(cells[2], sessions_file, line_no, 3));
        entries.emplace_back(cells[0], s);
    }
    if (entries.empty()) throw std::runtime_error(sessions_file.string() + ": no sessions");

    Dataset dataset;
    std::vector<std::string> order;  // first-appearance order of subjects
    for (const auto& [id, raw] : entries) {
        if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
        dataset.n_classes = std::max(dataset.n_classes, raw.label);
    }
    for (const std::string& id : order) {
        SubjectRecord subject;
        subject.subject_id = id;
        subject.series = load_series_csv(dir / ("subject_" + id + ".csv"));
        std::int64_t offset = 0;
        for (const auto& [entry_id, raw] : entries) {
            if (entry_id != id) continue;
            subject.sessions.push_back({raw.label, raw.scans, offset});
            offset += raw.scans;
        }
        dataset.subjects.push_back(std::move(subject));
    }
    dataset.validate();
    return dataset;
}

void save_dataset_csv(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream sessions(dir / "sessions.csv");
    if (!sessions) throw std::runtime_error("cannot write " + (dir / "sessions.csv").string());
    sessions << "subject_id,task_label,n_scans\n";
    for (const auto& subject : dataset.subjects) {
        for (const auto& session : subject.sessions) {
            sessions << subject.subject_id << ',' << session.task_label << ','
                     << session.n_scans << '\n';
        }
        std::ofstream series(dir / ("subject_" + subject.subject_id + ".csv"));
        if (!series) {
            throw std::runtime_error("cannot write subject " + subject.subject_id);
        }
        series << std::setprecision(17);
        for (Index r = 0; r < subject.series.rows(); ++r) {
            for (Index c = 0; c < subject.series.cols(); ++c) {
                if (c > 0) series << ',';
                series << subject.series(r, c);
            }
            series << '\n';
        }
    }
}

}  // namespace

DataFormat data_format_from_name(std::string_view name) {
    if (name == "csv") return DataFormat::csv;
    if (name == "bin") return DataFormat::bin;
    throw std::invalid_argument("unknown data format: " + std::string(name));
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    if (format == DataFormat::csv) return load_dataset_csv(path);

    auto in = open_for_read(path);
    expect_kind(read_header(in, path), ContainerKind::dataset, path);
    Dataset dataset;
    const std::uint64_t n_subjects = read_u64(in);
    const std::uint64_t r_count = read_u64(in);
    dataset.n_classes = static_cast<int>(read_u32(in));
    const std::uint32_t n_names = read_u32(in);
    for (std::uint32_t i = 0; i < n_names; ++i) dataset.region_names.push_back(read_string(in));

    for (std::uint64_t s = 0; s < n_subjects; ++s) {
        SubjectRecord subject;
        subject.subject_id = read_string(in);
        const std::uint64_t timeline = read_u64(in);
        const std::uint64_t n_sessions = read_u64(in);
        for (std::uint64_t q = 0; q < n_sessions; ++q) {
            SessionSpec spec;
            spec.task_label = static_cast<int>(read_u32(in));
            spec.n_scans = static_cast<std::int64_t>(read_u64(in));
            spec.offset = static_cast<std::int64_t>(read_u64(in));
            subject.sessions.push_back(spec);
        }
        subject.series = read_matrix(in, static_cast<Index>(r_count),
                                     static_cast<Index>(timeline));
        dataset.subjects.push_back(std::move(subject));
    }
    dataset.validate();
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format) {
    dataset.validate();
    if (format == DataFormat::csv) {
        save_dataset_csv(dataset, path);
        return;
    }
    auto out = open_for_write(path);
    write_header(out, ContainerKind::dataset);
    write_u64(out, dataset.subjects.size());
    write_u64(out, static_cast<std::uint64_t>(dataset.n_regions()));
    write_u32(out, static_cast<std::uint32_t>(dataset.n_classes));
    write_u32(out, static_cast<std::uint32_t>(dataset.region_names.size()));
    for (const auto& name : dataset.region_names) write_string(out, name);
    for (const auto& subject : dataset.subjects) {
        write_string(out, subject.subject_id);
        write_u64(out, static_cast<std::uint64_t>(subject.timeline_length()));
        write_u64(out, subject.sessions.size());
        for (const auto& session : subject.sessions) {
            write_u32(out, static_cast<std::uint32_t>(session.task_label));
            write_u64(out, static_cast<std::uint64_t>(session.n_scans));
            write_u64(out, static_cast<std::uint64_t>(session.offset));
        }
        write_matrix(out, subject.series);
    }
}

void save_subband_stack(const SubbandStack& stack, const std::filesystem::path& file) {
    auto out = open_for_write(file);
    write_header(out, ContainerKind::stack);
    write_string(out, stack.subject_id);
    write_string(out, stack.family);
    write_u32(out, static_cast<std::uint32_t>(stack.levels));
    write_u32(out, static_cast<std::uint32_t>(stack.bands.size()));
    const Index rows = stack.bands.empty() ? 0 : stack.bands.front().rows();
    const Index cols = stack.bands.empty() ? 0 : stack.bands.front().cols();
    write_u64(out, static_cast<std::uint64_t>(rows));
    write_u64(out, static_cast<std::uint64_t>(cols));
    for (std::uint32_t j = 0; j < stack.bands.size(); ++j) {
        // Subband table entry: index and label ("A3", "D1", ...).
        write_u32(out, j);
        write_string(out, SubbandIndex(static_cast<int>(j), stack.levels).label());
    }
    for (const Matrix& band : stack.bands) write_matrix(out, band);
}

SubbandStack load_subband_stack(const std::filesystem::path& file) {
    auto in = open_for_read(file);
    expect_kind(read_header(in, file), ContainerKind::stack, file);
    SubbandStack stack;
    stack.subject_id = read_string(in);
    stack.family = read_string(in);
    stack.levels = static_cast<int>(read_u32(in));
    const std::uint32_t n_bands = read_u32(in);
    const Index rows = static_cast<Index>(read_u64(in));
    const Index cols = static_cast<Index>(read_u64(in));
    for (std::uint32_t j = 0; j < n_bands; ++j) {
        read_u32(in);
        read_string(in);
    }
    for (std::uint32_t j = 0; j < n_bands; ++j) {
        stack.bands.push_back(read_matrix(in, rows, cols));
    }
    return stack;
}

void save_feature_table(const FeatureTable& table, const std::filesystem::path& file) {
    auto out = open_for_write(file);
    write_header(out, ContainerKind::features);
    write_string(out, feature_kind_name(table.kind));
    write_u32(out, static_cast<std::uint32_t>(table.subband.j));
    write_u32(out, static_cast<std::uint32_t>(table.subband.levels));
    write_u64(out, static_cast<std::uint64_t>(table.features.rows()));
    write_u64(out, static_cast<std::uint64_t>(table.features.cols()));
    for (const int label : table.labels) write_u32(out, static_cast<std::uint32_t>(label));
    for (const auto& id : table.subject_ids) write_string(out, id);
    write_matrix(out, table.features);
}

FeatureTable load_feature_table(const std::filesystem::path& file) {
    auto in = open_for_read(file);
    expect_kind(read_header(in, file), ContainerKind::features, file);
    FeatureTable table;
    table.kind = feature_kind_from_name(read_string(in));
    const int j = static_cast<int>(read_u32(in));
    const int levels = static_cast<int>(read_u32(in));
    table.subband = SubbandIndex(j, levels);
    const Index rows = static_cast<Index>(read_u64(in));
    const Index cols = static_cast<Index>(read_u64(in));
    table.labels.resize(static_cast<std::size_t>(rows));
    for (auto& label : table.labels) label = static_cast<int>(read_u32(in));
    table.subject_ids.resize(static_cast<std::size_t>(rows));
    for (auto& id : table.subject_ids) id = read_string(in);
    table.features = read_matrix(in, rows, cols);
    return table;
}

void export_feature_table_csv(const FeatureTable& table, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << std::setprecision(17);
    out << "subject_id,task_label,features...\n";
    for (Index r = 0; r < table.features.rows(); ++r) {
        out << table.subject_ids[static_cast<std::size_t>(r)] << ','
            << table.labels[static_cast<std::size_t>(r)];
        for (Index c = 0; c < table.features.cols(); ++c) out << ',' << table.features(r, c);
        out << '\n';
    }
}

void save_memberships(const MembershipMatrix& m, const std::filesystem::path& file) {
    auto out = open_for_write(file);
    write_header(out, ContainerKind::memberships);
    write_u32(out, static_cast<std::uint32_t>(m.n_classes));
    write_u32(out, static_cast<std::uint32_t>(m.base_labels.size()));
    for (const auto& label : m.base_labels) write_string(out, label);
    write_u64(out, static_cast<std::uint64_t>(m.memberships.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.memberships.cols()));
    for (const int label : m.labels) write_u32(out, static_cast<std::uint32_t>(label));
    for (const auto& id : m.subject_ids) write_string(out, id);
    write_matrix(out, m.memberships);
}

MembershipMatrix load_memberships(const std::filesystem::path& file) {
    auto in = open_for_read(file);
    expect_kind(read_header(in, file), ContainerKind::memberships, file);
    MembershipMatrix m;
    m.n_classes = static_cast<int>(read_u32(in));
    const std::uint32_t n_bases = read_u32(in);
    for (std::uint32_t i = 0; i < n_bases; ++i) m.base_labels.push_back(read_string(in));
    const Index rows = static_cast<Index>(read_u64(in));
    const Index cols = static_cast<Index>(read_u64(in));
    m.labels.resize(static_cast<std::size_t>(rows));
    for (auto& label : m.labels) label = static_cast<int>(read_u32(in));
    m.subject_ids.resize(static_cast<std::size_t>(rows));
    for (auto& id : m.subject_ids) id = read_string(in);
    m.memberships = read_matrix(in, rows, cols);
    return m;
}

std::uint64_t hash_file(const std::filesystem::path& file) {
    auto in = open_for_read(file);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[65536];
    while (in) {
        in.read(buffer, sizeof(buffer));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

}  // namespace meshband
