#include "metaweave/svg.hpp"

#include <cmath>
#include <cstdio>

namespace metaweave::svg {

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

struct Rgb {
    double r, g, b;
};

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
    return Rgb{a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

std::string hex(const Rgb& c) {
    char buf[8];
    auto clamp = [](double v) {
        return static_cast<int>(std::lround(v < 0 ? 0 : (v > 255 ? 255 : v)));
    };
    std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", clamp(c.r), clamp(c.g), clamp(c.b));
    return buf;
}

const Rgb kNegative{0x21, 0x66, 0xAC}; // #2166AC
const Rgb kMidpoint{0xF7, 0xF7, 0xF7}; // #F7F7F7
const Rgb kPositive{0xB2, 0x18, 0x2B}; // #B2182B

} // namespace

std::string diverging_color(double t) {
    if (t < -1.0) t = -1.0;
    if (t > 1.0) t = 1.0;
    if (t < 0.0) return hex(lerp(kMidpoint, kNegative, -t));
    return hex(lerp(kMidpoint, kPositive, t));
}

Element& Element::set(const std::string& name, const std::string& value) {
    attrs_.emplace_back(name, value);
    return *this;
}

Element& Element::set(const std::string& name, const char* value) {
    attrs_.emplace_back(name, std::string(value));
    return *this;
}

Element& Element::set(const std::string& name, double value) {
    attrs_.emplace_back(name, fmt2(value));
    return *this;
}

Element& Element::set(const std::string& name, int value) {
    attrs_.emplace_back(name, std::to_string(value));
    return *this;
}

Element& Element::text(std::string content) {
    text_ = std::move(content);
    return *this;
}

Element& Element::child(std::string tag) {
    children_.emplace_back(std::move(tag));
    return children_.back();
}

Element& Element::add(Element element) {
    children_.push_back(std::move(element));
    return children_.back();
}

void Element::write(std::string& out, int depth) const {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out.push_back('<');
    out += tag_;
    for (const auto& [name, value] : attrs_) {
        out.push_back(' ');
        out += name;
        out += "=\"";
        out += escape(value);
        out.push_back('"');
    }
    if (children_.empty() && text_.empty()) {
        out += "/>\n";
        return;
    }
    out.push_back('>');
    if (!text_.empty()) out += escape(text_);
    if (!children_.empty()) {
        out.push_back('\n');
        for (const Element& c : children_) c.write(out, depth + 1);
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
    }
    out += "</";
    out += tag_;
    out += ">\n";
}

SvgDocument::SvgDocument(double width, double height, const std::string& title)
    : width_(width), height_(height), root_("svg") {
    root_.set("xmlns", "http://www.w3.org/2000/svg")
        .set("width", width_)
        .set("height", height_)
        .set("viewBox", "0 0 " + fmt2(width_) + " " + fmt2(height_))
        .set("role", "img")
        .set("aria-label", title);
    root_.child("title").text(title);
}

std::string SvgDocument::to_string() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    root_.write(out, 0);
    return out;
}

} // namespace metaweave::svg
