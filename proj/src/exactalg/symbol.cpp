#include "piii/exactalg/symbol.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {
namespace {

struct Registry {
  std::mutex mu;
  std::deque<std::string> names;  // deque: references survive growth
  std::unordered_map<std::string, std::uint8_t> index;

  Registry() {
    for (const char* n : {"z", "t", "q", "a", "theta", "theta0", "thetainf", "d", "eps1", "eps2", "alpha",
                          "beta", "a1", "a2", "b1", "b2", "e", "c1", "c2", "l1", "l2", "l3", "l4", "x1", "x2",
                          "x3", "lambda"})
      add(n);
  }
  std::uint8_t add(const std::string& n) {
    if (names.size() >= 255) throw RingError("symbol registry full");
    auto id = static_cast<std::uint8_t>(names.size());
    names.push_back(n);
    index.emplace(n, id);
    return id;
  }
};

Registry& reg() {
  static Registry r;
  return r;
}

}  // namespace

Symbol Symbol::intern(std::string_view name) {
  auto& r = reg();
  std::lock_guard<std::mutex> lk(r.mu);
  std::string key(name);
  auto it = r.index.find(key);
  if (it != r.index.end()) return from_index(it->second);
  return from_index(r.add(key));
}

bool Symbol::lookup(std::string_view name, Symbol* out) {
  auto& r = reg();
  std::lock_guard<std::mutex> lk(r.mu);
  auto it = r.index.find(std::string(name));
  if (it == r.index.end()) return false;
  *out = from_index(it->second);
  return true;
}

const std::string& Symbol::name() const {
  auto& r = reg();
  std::lock_guard<std::mutex> lk(r.mu);
  return r.names[id_];
}

Level Symbol::level() const {
  static const Symbol th = intern("theta"), th0 = intern("theta0"), thi = intern("thetainf"),
                      al = intern("alpha"), be = intern("beta");
  if (*this == th || *this == th0 || *this == thi) return Level::theta;
  if (*this == al || *this == be) return Level::alpha;
  return Level::neutral;
}

std::size_t registry_size() {
  auto& r = reg();
  std::lock_guard<std::mutex> lk(r.mu);
  return r.names.size();
}

namespace sym {
Symbol z() { static Symbol s = Symbol::intern("z"); return s; }
Symbol t() { static Symbol s = Symbol::intern("t"); return s; }
Symbol q() { static Symbol s = Symbol::intern("q"); return s; }
Symbol a() { static Symbol s = Symbol::intern("a"); return s; }
Symbol theta() { static Symbol s = Symbol::intern("theta"); return s; }
Symbol theta0() { static Symbol s = Symbol::intern("theta0"); return s; }
Symbol thetainf() { static Symbol s = Symbol::intern("thetainf"); return s; }
Symbol d() { static Symbol s = Symbol::intern("d"); return s; }
Symbol eps1() { static Symbol s = Symbol::intern("eps1"); return s; }
Symbol eps2() { static Symbol s = Symbol::intern("eps2"); return s; }
Symbol alpha() { static Symbol s = Symbol::intern("alpha"); return s; }
Symbol beta() { static Symbol s = Symbol::intern("beta"); return s; }
}  // namespace sym

}  // namespace piii::exactalg
