#include "gapped1d/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>

namespace gapped1d {

namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

void check_hermitian(const Matrix& m, const char* what) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(std::string(what) + ": term is not Hermitian");
}

// Field-splitting weights for open boundaries.
void field_weights(int n, std::vector<double>& alpha, std::vector<double>& beta) {
  alpha.assign(n - 1, 0.5);
  beta.assign(n - 1, 0.5);
  alpha.front() = 1.0;
  beta.back() = 1.0;
  if (n == 2) alpha[0] = beta[0] = 1.0;
}

}  // namespace

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  ModelSpec s;
  const std::string kind = j.at("model").get<std::string>();
  if (kind == "tfim")
    s.kind = ModelKind::Tfim;
  else if (kind == "xxz")
    s.kind = ModelKind::Xxz;
  else if (kind == "explicit")
    s.kind = ModelKind::Explicit;
  else
    throw std::invalid_argument("ModelSpec: unknown model '" + kind + "'");
  s.n = j.at("n").get<int>();
  s.d = j.value("d", 2);
  if (s.n < 2) throw std::invalid_argument("ModelSpec: n must be >= 2");
  if (s.d < 2) throw std::invalid_argument("ModelSpec: d must be >= 2");
  const auto params = j.value("params", nlohmann::json::object());
  for (const auto& item : params.items()) {
    const std::string& key = item.key();
    const bool ok = s.kind == ModelKind::Tfim
                        ? key == "g"
                        : s.kind == ModelKind::Xxz
                              ? (key == "delta" || key == "h")
                              : key == "terms";
    if (!ok)
      throw std::invalid_argument("ModelSpec: parameter '" + key +
                                  "' does not belong to model '" + kind + "'");
  }
  s.g = params.value("g", 2.0);
  s.delta = params.value("delta", 1.5);
  s.h = params.value("h", 0.5);
  if (s.kind == ModelKind::Explicit) {
    if (!params.contains("terms"))
      throw std::invalid_argument("ModelSpec: explicit model needs params.terms");
    const auto& terms = params.at("terms");
    const int dd = s.d * s.d;
    for (const auto& tj : terms) {
      Matrix t = Matrix::Zero(dd, dd);
      // terms serialized as row-major [re, im, re, im, ...]
      const auto data = tj.get<std::vector<double>>();
      if (static_cast<int>(data.size()) != 2 * dd * dd)
        throw std::invalid_argument("ModelSpec: explicit term has wrong size");
      for (int r = 0; r < dd; ++r)
        for (int c = 0; c < dd; ++c)
          t(r, c) = cxd(data[2 * (r * dd + c)], data[2 * (r * dd + c) + 1]);
      s.explicit_terms.push_back(std::move(t));
    }
    if (static_cast<int>(s.explicit_terms.size()) != s.n - 1)
      throw std::invalid_argument("ModelSpec: explicit model needs n-1 terms");
  }
  return s;
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["d"] = d;
  nlohmann::json params = nlohmann::json::object();
  switch (kind) {
    case ModelKind::Tfim:
      j["model"] = "tfim";
      params["g"] = g;
      break;
    case ModelKind::Xxz:
      j["model"] = "xxz";
      params["delta"] = delta;
      params["h"] = h;
      break;
    case ModelKind::Explicit: {
      j["model"] = "explicit";
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : explicit_terms) {
        std::vector<double> data;
        data.reserve(2 * t.size());
        for (Eigen::Index r = 0; r < t.rows(); ++r)
          for (Eigen::Index c = 0; c < t.cols(); ++c) {
            data.push_back(t(r, c).real());
            data.push_back(t(r, c).imag());
          }
        terms.push_back(data);
      }
      params["terms"] = terms;
      break;
    }
  }
  j["params"] = params;
  return j;
}

std::string ModelSpec::name() const {
  std::string base = "?";
  switch (kind) {
    case ModelKind::Tfim:
      base = "tfim";
      break;
    case ModelKind::Xxz:
      base = "xxz";
      break;
    case ModelKind::Explicit:
      base = "explicit";
      break;
  }
  return base + "-n" + std::to_string(n);
}

LocalHamiltonian::LocalHamiltonian(int n, int d, std::vector<Matrix> terms)
    : n_(n), d_(d), terms_(std::move(terms)) {
  if (n_ < 2) throw std::invalid_argument("LocalHamiltonian: n must be >= 2");
  if (static_cast<int>(terms_.size()) != n_ - 1)
    throw std::invalid_argument("LocalHamiltonian: expected n-1 terms");
  const int dd = d_ * d_;
  for (const auto& t : terms_) {
    if (t.rows() != dd || t.cols() != dd)
      throw std::invalid_argument("LocalHamiltonian: term shape mismatch");
    check_hermitian(t, "LocalHamiltonian");
  }
  scales_.assign(terms_.size(), AffineScale{});
}

LocalHamiltonian LocalHamiltonian::build(const ModelSpec& spec) {
  if (spec.kind == ModelKind::Explicit)
    return LocalHamiltonian(spec.n, spec.d, spec.explicit_terms);
  if (spec.n < 2)
    throw std::invalid_argument("LocalHamiltonian: n must be >= 2");
  if (spec.d != 2)
    throw std::invalid_argument("LocalHamiltonian: built-in models are d=2");
  const Matrix X = pauli_x(), Y = pauli_y(), Z = pauli_z();
  const Matrix I2 = Matrix::Identity(2, 2);
  std::vector<double> alpha, beta;
  field_weights(spec.n, alpha, beta);
  std::vector<Matrix> terms;
  terms.reserve(spec.n - 1);
  for (int t = 0; t < spec.n - 1; ++t) {
    Matrix m;
    if (spec.kind == ModelKind::Tfim) {
      m = -kron(Z, Z) -
          spec.g * (alpha[t] * kron(X, I2) + beta[t] * kron(I2, X));
    } else {
      m = kron(X, X) + kron(Y, Y) + spec.delta * kron(Z, Z) -
          spec.h * (alpha[t] * kron(Z, I2) + beta[t] * kron(I2, Z));
    }
    terms.push_back(std::move(m));
  }
  return LocalHamiltonian(spec.n, spec.d, std::move(terms));
}

LocalHamiltonian LocalHamiltonian::normalized() const {
  LocalHamiltonian out(*this);
  const int dd = d_ * d_;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(terms_[t], Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(dd - 1);
    const double spread = lmax - lmin;
    if (spread < 1e-14) {
      // constant term: normalized form is zero, shift carries everything
      out.terms_[t] = Matrix::Zero(dd, dd);
      out.scales_[t] = AffineScale{lmin, 1.0};
    } else {
      out.terms_[t] =
          (terms_[t] - lmin * Matrix::Identity(dd, dd)) / spread;
      out.scales_[t] = AffineScale{lmin, spread};
    }
  }
  out.normalized_ = true;
  return out;
}

const Matrix& LocalHamiltonian::term(int t) const {
  if (t < 0 || t >= term_count())
    throw std::out_of_range("LocalHamiltonian::term: index out of range");
  return terms_[t];
}

Matrix LocalHamiltonian::projection_term(int t) const {
  if (!normalized_)
    throw std::logic_error("projection_term: Hamiltonian must be normalized");
  const int dd = d_ * d_;
  return Matrix::Identity(dd, dd) - term(t);
}

double LocalHamiltonian::model_energy(
    const std::vector<double>& normalized_term_energies) const {
  if (!normalized_)
    throw std::logic_error("model_energy: Hamiltonian must be normalized");
  if (static_cast<int>(normalized_term_energies.size()) != term_count())
    throw std::invalid_argument("model_energy: need one energy per term");
  double e = 0.0;
  for (int t = 0; t < term_count(); ++t)
    e += scales_[t].scale * normalized_term_energies[t] + scales_[t].shift;
  return e;
}

std::vector<SpectrumFixture> load_spectrum_fixtures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file: " + path);
  nlohmann::json j;
  in >> j;
  std::vector<SpectrumFixture> out;
  for (const auto& rec : j) {
    SpectrumFixture f;
    f.model = ModelSpec::from_json(rec);
    f.epsilon0 = rec.at("epsilon0").get<double>();
    f.epsilon1 = rec.at("epsilon1").get<double>();
    out.push_back(std::move(f));
  }
  return out;
}

void save_spectrum_fixtures(const std::string& path,
                            const std::vector<SpectrumFixture>& fixtures) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& f : fixtures) {
    nlohmann::json rec = f.model.to_json();
    rec["epsilon0"] = f.epsilon0;
    rec["epsilon1"] = f.epsilon1;
    j.push_back(rec);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fixture file: " + path);
  out << j.dump(1) << "\n";
}

}  // namespace gapped1d
