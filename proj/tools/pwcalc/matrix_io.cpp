#include "matrix_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <pwcalc/errors.hpp>

namespace pwcalc::cli {

namespace {

std::size_t read_dim(const Json& j, const std::string& what) {
    if (!j.is_object()) fail(ErrorKind::input, what + ": expected a JSON object");
    if (!j.contains("n")) fail(ErrorKind::input, what + ": missing field 'n'");
    const auto& n = j["n"];
    if (!n.is_number_integer() || n.get<long long>() < 1)
        fail(ErrorKind::input, what + ": 'n' must be a positive integer");
    return static_cast<std::size_t>(n.get<long long>());
}

double read_real(const Json& v, const std::string& where) {
    if (!v.is_number()) fail(ErrorKind::input, where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorKind::input, where + ": value is not finite");
    return d;
}

} // namespace

Matrix matrix_from_json(const Json& j, const std::string& what) {
    const std::size_t n = read_dim(j, what);
    Matrix m(n, n);
    for (const char* part : {"re", "im"}) {
        const bool imag = part[0] == 'i';
        if (!j.contains(part)) {
            if (!imag) fail(ErrorKind::input, what + ": missing field 're'");
            continue;
        }
        const auto& rows = j[part];
        if (!rows.is_array() || rows.size() != n)
            fail(ErrorKind::input, what + ": '" + part + "' must have " + std::to_string(n) + " rows");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = rows[i];
            if (!row.is_array() || row.size() != n)
                fail(ErrorKind::input, what + ": '" + part + "' row " + std::to_string(i) + " must have " +
                                           std::to_string(n) + " entries");
            for (std::size_t k = 0; k < n; ++k) {
                const double v = read_real(row[k], what + ": " + part + "[" + std::to_string(i) + "][" +
                                                       std::to_string(k) + "]");
                if (imag)
                    m(i, k).imag(v);
                else
                    m(i, k).real(v);
            }
        }
    }
    return m;
}

std::vector<cplx> vector_from_json(const Json& j, const std::string& what) {
    const std::size_t n = read_dim(j, what);
    std::vector<cplx> v(n);
    for (const char* part : {"re", "im"}) {
        const bool imag = part[0] == 'i';
        if (!j.contains(part)) {
            if (!imag) fail(ErrorKind::input, what + ": missing field 're'");
            continue;
        }
        const auto& arr = j[part];
        if (!arr.is_array() || arr.size() != n)
            fail(ErrorKind::input, what + ": '" + part + "' must have " + std::to_string(n) + " entries");
        for (std::size_t i = 0; i < n; ++i) {
            const double x = read_real(arr[i], what + ": " + part + "[" + std::to_string(i) + "]");
            if (imag)
                v[i].imag(x);
            else
                v[i].real(x);
        }
    }
    return v;
}

Json matrix_to_json(const Matrix& m) {
    Json re = Json::array(), im = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json rr = Json::array(), ii = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            rr.push_back(m(i, k).real());
            ii.push_back(m(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    Json out;
    out["n"] = m.rows();
    out["re"] = std::move(re);
    out["im"] = std::move(im);
    return out;
}

Json vector_to_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(x);
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

LoadedFile load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::input, "cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LoadedFile f;
    f.path = path;
    f.sha256 = sha256_hex(bytes);
    try {
        f.content = Json::parse(bytes);
    } catch (const Json::parse_error& e) {
        fail(ErrorKind::input, "'" + path + "' is not valid JSON: " + e.what());
    }
    return f;
}

} // namespace pwcalc::cli
