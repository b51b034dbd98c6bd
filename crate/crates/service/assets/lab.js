// Virtual metrology lab: scale rendering, dragging, show-reading and quiz mode.

// Client-side mirror of the server arithmetic, built from a template's
// metadata. Pure, so it also runs under node for parity tests.
var vmlabMirror = function (metadata) {
  "use strict";
  function gcd(a, b) { a = Math.abs(a); b = Math.abs(b); while (b) { var t = a % b; a = b; b = t; } return a; }
  function rat(num, den) { var g = gcd(num, den) || 1; return { num: num / g, den: den / g }; }
  function mul(a, b) { return rat(a.num * b.num, a.den * b.den); }
  function perBase(unit) { return unit === "μm" ? 1000 : 1; }
  function symbol(unit) { return unit === "degree" ? "°" : unit; }

  function trimmed(r) {
    var d = 0, scaled = r;
    while (scaled.den !== 1 && d < 12) { d += 1; scaled = mul(r, rat(Math.pow(10, d), 1)); }
    return fixed(scaled.num, d);
  }
  function fixed(units, decimals) {
    if (decimals === 0) return String(units);
    var s = String(units);
    while (s.length <= decimals) s = "0" + s;
    return s.slice(0, s.length - decimals) + "." + s.slice(s.length - decimals);
  }

  function meta() { return metadata; }
  function lcDisplay() { var m = meta(); return mul(m.least_count, rat(perBase(m.display_unit), 1)); }
  function coarseTicks() { var m = meta(); return m.divisions_per_revolution || m.main_division_ticks; }

  function formatValue(ticks) {
    var m = meta();
    var scaled = mul(mul(lcDisplay(), rat(ticks, 1)), rat(Math.pow(10, m.display_decimals), 1));
    return fixed(scaled.num, m.display_decimals);
  }

  function decompose(ticks) {
    var per = coarseTicks();
    return { coarse: Math.floor(ticks / per), fine: ticks % per };
  }

  function readingText(ticks) {
    var m = meta(), r = decompose(ticks), unit = symbol(m.display_unit);
    var lc = trimmed(lcDisplay()), v = formatValue(ticks);
    switch (m.kind) {
      case "caliper":
      case "protractor":
        return "main " + trimmed(mul(m.main_division, rat(r.coarse, 1))) + " " + unit + " + vernier " + r.fine +
          " × " + lc + " " + unit + " = " + v + " " + unit;
      case "micrometer":
        return "sleeve " + r.coarse + " × " + trimmed(m.main_division) + " " + unit + " + thimble " + r.fine +
          " × " + lc + " " + unit + " = " + v + " " + unit;
      default:
        return "revolutions " + r.coarse + " + dial " + r.fine + " × " + lc + " " + unit + " = " + v + " " + unit;
    }
  }

  function transformFor(ticks) {
    var m = meta();
    if (m.kind === "dial") {
      var per = m.divisions_per_revolution, revs = m.range_max_ticks / per;
      return {
        transform: { kind: "rotation", amount: rat(360 * (ticks % per), per) },
        counter: { kind: "rotation", amount: rat(360 * (Math.floor(ticks / per) % revs), revs) }
      };
    }
    return { transform: { kind: m.kind === "protractor" ? "rotation" : "translation", amount: mul(m.least_count, rat(ticks, 1)) }, counter: null };
  }

  return { formatValue: formatValue, decompose: decompose, readingText: readingText, transformFor: transformFor };
};
if (typeof module !== "undefined" && module.exports) module.exports = vmlabMirror;

(function () {
  "use strict";
  if (typeof document === "undefined") return;

  var body = document.body;
  var kind = body.dataset.kind;
  if (!kind) return;
  var offline = body.dataset.offline === "true";
  var SVG_NS = "http://www.w3.org/2000/svg";
  var PX_PER_TICK = 4;
  var API = "/api/v1";

  var el = function (id) { return document.getElementById(id); };
  var stage = el("stage");
  var readingEl = el("reading");
  var feedbackEl = el("feedback");
  var statsEl = el("stats");
  var showReading = el("show-reading");
  var form = el("answer-form");
  var answer = el("answer");
  var nextBtn = el("next");

  var tpl = null;
  var view = { mode: "explore", ticks: 0, showReading: false, exercise: null, revealed: false, busy: false };

  var mirror = null;
  function meta() { return tpl.metadata; }
  function val(r) { return r.num / r.den; }
  function readingText(t) { return mirror.readingText(t); }
  function transformFor(t) { return mirror.transformFor(t); }

  // ---- drawing ----
  function node(name, attrs, text) {
    var n = document.createElementNS(SVG_NS, name);
    Object.keys(attrs).forEach(function (k) { n.setAttribute(k, attrs[k]); });
    if (text !== undefined) n.textContent = text;
    return n;
  }
  function line(parent, x1, y1, x2, y2, cls) { parent.appendChild(node("line", { x1: x1, y1: y1, x2: x2, y2: y2, "class": cls })); }
  function label(parent, x, y, text, cls) { parent.appendChild(node("text", { x: x, y: y, "text-anchor": "middle", "class": cls }, text)); }
  function len(mark, major, minor) { return mark.tier === "major" ? major : minor; }

  function draw(placement, highlight) {
    stage.textContent = "";
    var m = meta();
    if (m.kind === "caliper") drawCaliper(placement, highlight);
    else if (m.kind === "micrometer") drawMicrometer(placement, highlight);
    else if (m.kind === "dial") drawDial(placement, highlight);
    else drawProtractor(placement, highlight);
  }

  function drawCaliper(p, highlight) {
    var pxPerUnit = PX_PER_TICK / val(meta().least_count);
    var span = val(tpl.fixed_marks[tpl.fixed_marks.length - 1].axis_pos);
    var width = Math.ceil(span * pxPerUnit) + 40, x0 = 20, base = 80;
    var svg = node("svg", { width: width, height: 170, viewBox: "0 0 " + width + " 170" });
    tpl.fixed_marks.forEach(function (mk) {
      var x = x0 + val(mk.axis_pos) * pxPerUnit;
      line(svg, x, base, x, base - len(mk, 30, 15), "fixed");
      if (mk.label) label(svg, x, base - 36, mk.label, "fixed");
    });
    var g = node("g", { transform: "translate(" + val(p.transform.amount) * pxPerUnit + ",0)" });
    tpl.moving_marks.forEach(function (mk, j) {
      var x = x0 + val(mk.axis_pos) * pxPerUnit, cls = j === highlight ? "moving hot" : "moving";
      line(g, x, base, x, base + len(mk, 28, 16), cls);
      if (mk.label) label(g, x, base + 44, mk.label, cls);
    });
    svg.appendChild(g);
    stage.appendChild(svg);
    stage.scrollLeft = Math.max(0, x0 + val(p.transform.amount) * pxPerUnit - stage.clientWidth / 3);
  }

  function drawMicrometer(p, highlight) {
    var pxPerMm = 40, x0 = 30, axis = 120;
    var span = val(tpl.fixed_marks[tpl.fixed_marks.length - 1].axis_pos);
    var width = Math.ceil(span * pxPerMm) + 200;
    var svg = node("svg", { width: width, height: 240, viewBox: "0 0 " + width + " 240" });
    var edge = x0 + val(p.transform.amount) * pxPerMm;
    line(svg, x0, axis, edge, axis, "fixed");
    tpl.fixed_marks.forEach(function (mk, i) {
      var x = x0 + val(mk.axis_pos) * pxPerMm;
      if (x > edge + 1e-9) return;
      if (i % 2 === 0) line(svg, x, axis, x, axis - len(mk, 20, 12), "fixed"); else line(svg, x, axis, x, axis + 12, "fixed");
      if (mk.label) label(svg, x, axis - 26, mk.label, "fixed");
    });
    svg.appendChild(node("rect", { x: edge, y: 30, width: 110, height: 180, "class": "thimble" }));
    var count = tpl.moving_marks.length;
    var rot = Math.round(val(p.transform.amount) / val(meta().least_count)) % count;
    for (var d = -10; d <= 10; d++) {
      var j = ((rot + d) % count + count) % count, mk = tpl.moving_marks[j], y = axis - d * 8;
      var cls = d === 0 && highlight !== null ? "moving hot" : "moving";
      line(svg, edge, y, edge + len(mk, 22, 12), y, cls);
      if (mk.label) label(svg, edge + 36, y + 4, mk.label, cls);
    }
    stage.appendChild(svg);
    stage.scrollLeft = Math.max(0, edge - stage.clientWidth / 2);
  }

  function polarCw(cx, cy, r, deg) { var a = deg * Math.PI / 180; return [cx + r * Math.sin(a), cy - r * Math.cos(a)]; }

  function drawDial(p, highlight) {
    var cx = 200, cy = 190, r = 160;
    var svg = node("svg", { width: 400, height: 380, viewBox: "0 0 400 380" });
    svg.appendChild(node("circle", { cx: cx, cy: cy, r: r, "class": "rim" }));
    tpl.fixed_marks.forEach(function (mk) {
      var a = val(mk.axis_pos), p1 = polarCw(cx, cy, r, a), p2 = polarCw(cx, cy, r - len(mk, 18, 9), a);
      line(svg, p1[0], p1[1], p2[0], p2[1], "fixed");
      if (mk.label) { var q = polarCw(cx, cy, r - 32, a); label(svg, q[0], q[1] + 4, mk.label, "fixed"); }
    });
    var ccy = cy + 70, cr = 30;
    svg.appendChild(node("circle", { cx: cx, cy: ccy, r: cr, "class": "rim" }));
    tpl.counter_marks.forEach(function (mk) {
      var a = val(mk.axis_pos), p1 = polarCw(cx, ccy, cr, a), p2 = polarCw(cx, ccy, cr - 6, a);
      line(svg, p1[0], p1[1], p2[0], p2[1], "fixed");
    });
    var c = polarCw(cx, ccy, cr - 8, p.counter ? val(p.counter.amount) : 0);
    line(svg, cx, ccy, c[0], c[1], "moving hand");
    var h = polarCw(cx, cy, r - 24, val(p.transform.amount));
    line(svg, cx, cy, h[0], h[1], highlight !== null ? "moving hand hot" : "moving hand");
    stage.appendChild(svg);
  }

  function drawProtractor(p, highlight) {
    var cx = 400, cy = 400, r = 320, shift = val(p.transform.amount);
    var at = function (radius, deg) { var a = deg * Math.PI / 180; return [cx + radius * Math.cos(a), cy - radius * Math.sin(a)]; };
    var svg = node("svg", { width: 800, height: 500, viewBox: "0 0 800 500" });
    tpl.fixed_marks.forEach(function (mk) {
      var a = val(mk.axis_pos), p1 = at(r, a), p2 = at(r + len(mk, 20, 10), a);
      line(svg, p1[0], p1[1], p2[0], p2[1], "fixed");
      if (mk.label) { var q = at(r + 34, a); label(svg, q[0], q[1] + 4, mk.label, "fixed"); }
    });
    tpl.moving_marks.forEach(function (mk, j) {
      var a = val(mk.axis_pos) + shift, cls = j === highlight ? "moving hot" : "moving";
      var p1 = at(r, a), p2 = at(r - len(mk, 20, 12), a);
      line(svg, p1[0], p1[1], p2[0], p2[1], cls);
      if (mk.label) { var q = at(r - 34, a); label(svg, q[0], q[1] + 4, mk.label, cls); }
    });
    var e = at(r - 60, shift);
    line(svg, cx, cy, e[0], e[1], "moving");
    stage.appendChild(svg);
  }

  // ---- explore mode ----
  var pending = null, inflight = false;
  function refreshReading() {
    if (!view.showReading || view.mode !== "explore") { readingEl.textContent = ""; return; }
    if (offline) { readingEl.textContent = readingText(view.ticks); return; }
    pending = view.ticks;
    if (inflight) return;
    inflight = true;
    var t = pending;
    pending = null;
    fetch(API + "/instruments/" + kind + "/reading?ticks=" + t)
      .then(function (r) { return r.json(); })
      .then(function (doc) { if (view.showReading && view.mode === "explore") readingEl.textContent = doc.text; })
      .catch(function () { readingEl.textContent = readingText(t); })
      .then(function () { inflight = false; if (pending !== null) setTimeout(refreshReading, 100); });
  }

  function renderExplore() {
    var highlight = view.showReading ? (meta().vernier_divisions ? view.ticks % meta().vernier_divisions : 0) : null;
    draw(transformFor(view.ticks), highlight);
    refreshReading();
  }

  function clampTicks(t) { return Math.max(0, Math.min(meta().range_max_ticks, Math.round(t))); }

  var drag = null;
  stage.addEventListener("pointerdown", function (e) {
    if (view.mode !== "explore") return;
    drag = { x: e.clientX, ticks: view.ticks };
    stage.setPointerCapture(e.pointerId);
  });
  stage.addEventListener("pointermove", function (e) {
    if (!drag) return;
    var next = clampTicks(drag.ticks + (e.clientX - drag.x) / PX_PER_TICK);
    if (next !== view.ticks) { view.ticks = next; renderExplore(); }
  });
  ["pointerup", "pointercancel"].forEach(function (ev) { stage.addEventListener(ev, function () { drag = null; }); });
  stage.tabIndex = 0;
  stage.addEventListener("keydown", function (e) {
    if (view.mode !== "explore") return;
    var step = e.key === "ArrowRight" ? 1 : e.key === "ArrowLeft" ? -1 : 0;
    if (step) { view.ticks = clampTicks(view.ticks + step); renderExplore(); e.preventDefault(); }
  });

  // ---- quiz mode ----
  function api(method, path, payload) {
    return fetch(API + path, {
      method: method,
      headers: payload ? { "Content-Type": "application/json" } : {},
      body: payload ? JSON.stringify(payload) : undefined
    }).then(function (r) {
      return r.json().then(function (doc) { return { status: r.status, doc: doc }; });
    });
  }

  function session() {
    var sid = localStorage.getItem("vmlab-session");
    var create = function () {
      return api("POST", "/sessions").then(function (r) { localStorage.setItem("vmlab-session", r.doc.session_id); return r.doc.session_id; });
    };
    if (!sid) return create();
    return api("GET", "/sessions/" + sid + "/stats").then(function (r) { return r.status === 200 ? sid : create(); });
  }

  function showStats(sid) {
    api("GET", "/sessions/" + sid + "/stats").then(function (r) {
      if (r.status !== 200) return;
      var k = r.doc.per_kind[kind], o = r.doc.overall;
      statsEl.textContent = "This instrument: " + k.correct + "/" + k.attempts + " · all instruments: " + o.correct + "/" + o.attempts;
    });
  }

  function newExercise() {
    feedbackEl.textContent = "";
    answer.value = "";
    view.revealed = false;
    showReading.checked = false;
    nextBtn.hidden = true;
    session().then(function (sid) {
      return api("POST", "/sessions/" + sid + "/exercises", { kind: kind }).then(function (r) {
        var eid = r.doc.exercise_id;
        return api("GET", "/sessions/" + sid + "/exercises/" + eid).then(function (v) {
          view.exercise = { sid: sid, eid: eid, open: true };
          draw({ transform: v.doc.transform, counter: v.doc.counter_transform || null }, null);
          form.hidden = false;
          answer.disabled = false;
          answer.focus();
          showStats(sid);
        });
      });
    }).catch(function () { feedbackEl.textContent = "Could not reach the lab server. Try again."; });
  }

  form.addEventListener("submit", function (e) {
    e.preventDefault();
    var ex = view.exercise;
    if (!ex || !ex.open || view.revealed || view.busy) return;
    view.busy = true;
    api("POST", "/sessions/" + ex.sid + "/exercises/" + ex.eid + "/answer", { text: answer.value })
      .then(function (r) {
        if (r.status === 200) {
          feedbackEl.textContent = r.doc.message;
          ex.open = false;
          answer.disabled = true;
          nextBtn.hidden = false;
          showStats(ex.sid);
        } else if (r.doc.code === "malformed_input") {
          feedbackEl.textContent = answer.value.indexOf(",") >= 0 ? "Use a decimal point, e.g. 12.3" : "Enter a number such as 12.3";
        } else {
          feedbackEl.textContent = r.doc.message;
          nextBtn.hidden = false;
        }
      })
      .catch(function () { feedbackEl.textContent = "Network error; your answer was not sent. Press Enter to retry."; })
      .then(function () { view.busy = false; });
  });

  // ---- controls ----
  showReading.addEventListener("change", function () {
    view.showReading = showReading.checked;
    if (view.mode === "explore") { renderExplore(); return; }
    var ex = view.exercise;
    if (!showReading.checked || !ex || !ex.open) return;
    api("POST", "/sessions/" + ex.sid + "/exercises/" + ex.eid + "/reveal").then(function (r) {
      if (r.status !== 200) return;
      view.revealed = true;
      ex.open = false;
      readingEl.textContent = r.doc.text;
      answer.disabled = true;
      feedbackEl.textContent = "Reading shown; start a new exercise to be graded.";
      nextBtn.hidden = false;
    });
  });

  el("reset").addEventListener("click", function () {
    if (view.mode === "explore") {
      view.ticks = 0;
      view.showReading = false;
      showReading.checked = false;
      feedbackEl.textContent = "";
      renderExplore();
    } else {
      answer.value = "";
    }
  });

  nextBtn.addEventListener("click", newExercise);

  Array.prototype.forEach.call(document.querySelectorAll("input[name=mode]"), function (radio) {
    radio.addEventListener("change", function () {
      view.mode = radio.value;
      readingEl.textContent = "";
      feedbackEl.textContent = "";
      showReading.checked = false;
      view.showReading = false;
      if (view.mode === "explore") {
        form.hidden = true;
        nextBtn.hidden = true;
        statsEl.textContent = "";
        renderExplore();
      } else {
        newExercise();
      }
    });
  });

  // ---- start ----
  function start(template) { tpl = template; mirror = vmlabMirror(template.metadata); renderExplore(); }
  if (offline) {
    start(window.VMLAB_TEMPLATES[kind]);
  } else {
    var load = function () {
      fetch(API + "/instruments/" + kind + "/template")
        .then(function (r) { if (!r.ok) throw new Error(r.status); return r.json(); })
        .then(start)
        .catch(function () { stage.textContent = "Could not load the instrument. Retrying…"; setTimeout(load, 2000); });
    };
    load();
  }
})();
