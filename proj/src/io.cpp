#include "isar/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace isar {
namespace {

void write_exact(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw Error("binary write failed");
}

void read_exact(std::ifstream& in, void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (in.gcount() != static_cast<std::streamsize>(bytes)) throw Error("binary read truncated");
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_exact(out, &v, 8); }

std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    read_exact(in, &v, 8);
    return v;
}

void write_vec(std::ofstream& out, const VecXd& v) {
    write_exact(out, v.data(), sizeof(double) * v.size());
}

VecXd read_vec(std::ifstream& in, std::size_t n) {
    VecXd v(n);
    read_exact(in, v.data(), sizeof(double) * n);
    return v;
}

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw Error("cannot open for reading: " + path);
    return in;
}

std::string format_field(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const std::string& path, const MatXd& values) {
    write_csv(path, {}, values);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const MatXd& values) {
    std::ofstream out = open_out(path, false);
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << '\n';
    }
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            out << (c ? "," : "") << format_field(values(r, c));
        out << '\n';
    }
    if (!out) throw Error("CSV write failed: " + path);
}

MatXd read_csv(const std::string& path) {
    std::ifstream in = open_in(path, false);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = line.find(',', pos);
            const std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                : comma - pos);
            row.push_back(std::stod(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return MatXd(0, 0);
    MatXd m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) throw Error("ragged CSV: " + path);
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

void write_pgm(const std::string& path, const Image& image) {
    std::ofstream out = open_out(path, true);
    const int nx = image.grid.nx(), ny = image.grid.ny();
    out << "P5\n" << nx << " " << ny << "\n255\n";
    std::vector<unsigned char> row(nx);
    for (int iy = ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double v = image.values(iy * nx + ix);
            row[ix] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
        }
        write_exact(out, row.data(), row.size());
    }
}

void write_echoes(const std::string& path, const EchoSetFreq& echoes) {
    std::ofstream out = open_out(path, true);
    write_exact(out, "ISARUF01", 8);
    write_u64(out, echoes.receiver_count());
    write_u64(out, echoes.pulse_count());
    write_u64(out, echoes.bin_count());
    write_vec(out, echoes.slow_times);
    write_vec(out, echoes.omega);
    for (const MatXcd& m : echoes.spectra) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const VecXcd row = m.row(i).transpose();
            write_exact(out, row.data(), sizeof(Complex) * m.cols());
        }
    }
}

EchoSetFreq read_echoes(const std::string& path) {
    std::ifstream in = open_in(path, true);
    char magic[8];
    read_exact(in, magic, 8);
    if (std::memcmp(magic, "ISARUF01", 8) != 0) throw Error("bad echo file magic: " + path);
    EchoSetFreq e;
    const std::uint64_t n_r = read_u64(in), n_s = read_u64(in), n_w = read_u64(in);
    e.slow_times = read_vec(in, n_s);
    e.omega = read_vec(in, n_w);
    e.spectra.assign(n_r, MatXcd(n_s, n_w));
    for (std::uint64_t r = 0; r < n_r; ++r) {
        for (std::uint64_t i = 0; i < n_s; ++i) {
            VecXcd row(n_w);
            read_exact(in, row.data(), sizeof(Complex) * n_w);
            e.spectra[r].row(i) = row.transpose();
        }
    }
    return e;
}

void write_correlations(const std::string& path, const CorrelationSet& set) {
    std::ofstream out = open_out(path, true);
    write_exact(out, "ISARCS01", 8);
    write_u64(out, set.receiver_count());
    write_u64(out, set.pulse_count());
    write_u64(out, set.bin_count());
    write_u64(out, set.lag_count());
    write_exact(out, set.reference_position.data(), sizeof(double) * 3);
    write_exact(out, set.reference_velocity.data(), sizeof(double) * 3);
    write_vec(out, set.slow_times);
    write_vec(out, set.omega);
    write_vec(out, set.lags);
    for (int r = 0; r < set.receiver_count(); ++r) {
        for (int i = 0; i < set.pulse_count(); ++i) {
            const VecXcd row = set.spectra[r].row(i).transpose();
            write_exact(out, row.data(), sizeof(Complex) * set.bin_count());
        }
        for (int i = 0; i < set.pulse_count(); ++i) {
            const VecXd row = set.auto_corr[r].row(i).transpose();
            write_exact(out, row.data(), sizeof(double) * set.lag_count());
        }
        for (int i = 0; i < set.pulse_count(); ++i) {
            const VecXd row = set.auto_envelope[r].row(i).transpose();
            write_exact(out, row.data(), sizeof(double) * set.lag_count());
        }
    }
}

CorrelationSet read_correlations(const std::string& path) {
    std::ifstream in = open_in(path, true);
    char magic[8];
    read_exact(in, magic, 8);
    if (std::memcmp(magic, "ISARCS01", 8) != 0) throw Error("bad correlation file magic: " + path);
    CorrelationSet set;
    const std::uint64_t n_r = read_u64(in), n_s = read_u64(in), n_w = read_u64(in),
                        n_l = read_u64(in);
    read_exact(in, set.reference_position.data(), sizeof(double) * 3);
    read_exact(in, set.reference_velocity.data(), sizeof(double) * 3);
    set.slow_times = read_vec(in, n_s);
    set.omega = read_vec(in, n_w);
    set.lags = read_vec(in, n_l);
    set.spectra.assign(n_r, MatXcd(n_s, n_w));
    set.auto_corr.assign(n_r, MatXd(n_s, n_l));
    set.auto_envelope.assign(n_r, MatXd(n_s, n_l));
    for (std::uint64_t r = 0; r < n_r; ++r) {
        for (std::uint64_t i = 0; i < n_s; ++i) {
            VecXcd row(n_w);
            read_exact(in, row.data(), sizeof(Complex) * n_w);
            set.spectra[r].row(i) = row.transpose();
        }
        for (std::uint64_t i = 0; i < n_s; ++i) {
            VecXd row(n_l);
            read_exact(in, row.data(), sizeof(double) * n_l);
            set.auto_corr[r].row(i) = row.transpose();
        }
        for (std::uint64_t i = 0; i < n_s; ++i) {
            VecXd row(n_l);
            read_exact(in, row.data(), sizeof(double) * n_l);
            set.auto_envelope[r].row(i) = row.transpose();
        }
    }
    return set;
}

void write_autocorrelation_csv(const std::string& path, const CorrelationSet& set, int receiver) {
    MatXd out(set.pulse_count() + 1, set.lag_count());
    out.row(0) = set.lags.transpose();
    out.bottomRows(set.pulse_count()) = set.auto_corr.at(receiver).cwiseAbs();
    write_csv(path, out);
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw Error("cannot create directory " + path + ": " + ec.message());
}

}  // namespace isar
