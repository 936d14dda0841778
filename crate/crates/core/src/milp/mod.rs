//! The continuous-time MILP as an explicit variable and row system.
//!
//! Variable names: `X(a)`, `Y(a)`, `Rollin(a)`, `Rollout(a)`, `DArr(f)`,
//! `DDep(a)`, `Accept(a)`, and pair binaries `Right(a,b)`, `Above(a,b)`,
//! `OutIn(a,b)`, `InIn(a,b)`, `OutOut(a,b)`, `InOut(a,b)`.
//!
//! Row names are `<family>(<ids>)` with families
//!
//! | family | meaning | domain |
//! |---|---|---|
//! | `eq2_accept` | rejection zeroes every continuous variable | F |
//! | `eq3_eta` | no roll-in before ETA | F |
//! | `eq4_servt` | stay covers service time | A |
//! | `eq5_darr`, `eq6_ddep` | delay definitions | F, A |
//! | `eq7_xmin` .. `eq10_ymax` | buffered walls | F |
//! | `eq11_right`, `eq12_above` | relative position binaries | a != b |
//! | `eq13_sep` | every accepted pair separated in space or time | a < b |
//! | `eq14_outin` | `a` leaves before `b` enters | a != b |
//! | `eq15_inin`, `eq16_inin` | roll-in order | f != g in F |
//! | `eq15b_outout`, `eq16b_outout` | roll-out order | a < b |
//! | `eq16c_inout`, `eq16d_inout` | roll-in of `a` versus roll-out of `b` | a != b, one in F |
//! | `eq17_exitblock` | a blocked aircraft leaves after its blocker | a != b |
//! | `eq18_entryblock` | no entry below a parked blocker | a != b, one in F |
//!
//! Fixed values of current aircraft and of the `InIn` entries involving
//! them are variable bounds tagged `fix19_accept` .. `fix25_inin`.
//! `a < b` refers to the order of [`Instance::aircraft`].

mod lp;
mod point;

pub use lp::{export_lp, parse_lp, ParsedLp, ParsedRow};
pub use point::{import_solution, parse_point};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cost::{derive_big_m, BigM};
use crate::error::{Error, Result};
use crate::geometry::{Footprint, Occupancy, TOL};
use crate::model::{AircraftSpec, Assignment, Instance, Solution};

/// Variable name to value.
pub type Point = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpVariable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    /// Name reported when a fixed bound is violated.
    pub fix_tag: Option<String>,
}

impl MilpVariable {
    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpRow {
    pub name: String,
    /// `(variable index, coefficient)`.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl MilpRow {
    pub fn family(&self) -> &str {
        family_of(&self.name)
    }

    /// Amount by which the row is violated at `values` (positive means violated).
    pub fn residual(&self, values: &[f64]) -> f64 {
        let lhs: f64 = self.terms.iter().map(|&(j, c)| c * values[j]).sum();
        match self.sense {
            Sense::Le => lhs - self.rhs,
            Sense::Ge => self.rhs - lhs,
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Family part of a row or tag name, `eq17_exitblock(a,b)` -> `eq17_exitblock`.
pub fn family_of(name: &str) -> &str {
    name.split('(').next().unwrap_or(name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub label: String,
    pub variables: Vec<MilpVariable>,
    pub rows: Vec<MilpRow>,
    /// Linear objective terms; the rejection term contributes the constant.
    pub objective: Vec<(usize, f64)>,
    pub objective_constant: f64,
    pub big_m: BigM,
    pub current: Vec<String>,
    pub future: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn row(&self, name: &str) -> Option<&MilpRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// All aircraft ids, current first.
    pub fn aircraft(&self) -> impl Iterator<Item = &String> {
        self.current.iter().chain(self.future.iter())
    }

    pub fn rows_in_family<'a>(&'a self, family: &'a str) -> impl Iterator<Item = &'a MilpRow> + 'a {
        self.rows.iter().filter(move |r| r.family() == family)
    }

    fn values(&self, point: &Point) -> Result<Vec<f64>> {
        self.variables
            .iter()
            .map(|v| point.get(&v.name).copied().ok_or_else(|| Error::MissingVariable(v.name.clone())))
            .collect()
    }
}

pub fn var_name(kind: &str, a: &str) -> String {
    format!("{kind}({a})")
}

pub fn pair_name(kind: &str, a: &str, b: &str) -> String {
    format!("{kind}({a},{b})")
}

struct Builder {
    model: MilpModel,
}

impl Builder {
    fn add_var(&mut self, name: String, kind: VarKind) -> usize {
        let upper = if kind == VarKind::Binary { 1.0 } else { f64::INFINITY };
        let j = self.model.variables.len();
        self.model.index.insert(name.clone(), j);
        self.model.variables.push(MilpVariable { name, kind, lower: 0.0, upper, fix_tag: None });
        j
    }

    fn fix(&mut self, name: &str, value: f64, tag: String) {
        let j = self.model.index[name];
        let v = &mut self.model.variables[j];
        v.lower = value;
        v.upper = value;
        v.fix_tag = Some(tag);
    }

    fn v(&self, name: &str) -> usize {
        self.model.index[name]
    }

    fn row(&mut self, name: String, terms: &[(&str, f64)], sense: Sense, rhs: f64) {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for &(n, c) in terms {
            let j = self.v(n);
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(t) => t.1 += c,
                None => merged.push((j, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        self.model.rows.push(MilpRow { name, terms: merged, sense, rhs });
    }
}

/// Builds the full model of an instance.
pub fn build_model(instance: &Instance) -> MilpModel {
    let m = derive_big_m(instance);
    let h = &instance.hangar;
    let (mt, mx, my, eps, buf) = (m.time, m.x, m.y, h.eps_t, h.buffer);
    let cur: Vec<&AircraftSpec> = instance.current.iter().collect();
    let fut: Vec<&AircraftSpec> = instance.future.iter().collect();
    let all: Vec<&AircraftSpec> = instance.aircraft().collect();
    let is_f = |a: &AircraftSpec| !a.is_current();

    let mut b = Builder {
        model: MilpModel {
            label: instance.label.clone(),
            variables: Vec::new(),
            rows: Vec::new(),
            objective: Vec::new(),
            objective_constant: 0.0,
            big_m: m,
            current: cur.iter().map(|a| a.id.clone()).collect(),
            future: fut.iter().map(|a| a.id.clone()).collect(),
            index: HashMap::new(),
        },
    };

    for a in &all {
        let id = &a.id;
        b.add_var(var_name("X", id), VarKind::Continuous);
        b.add_var(var_name("Y", id), VarKind::Continuous);
        b.add_var(var_name("Rollin", id), VarKind::Continuous);
        b.add_var(var_name("Rollout", id), VarKind::Continuous);
        if is_f(a) {
            b.add_var(var_name("DArr", id), VarKind::Continuous);
        }
        b.add_var(var_name("DDep", id), VarKind::Continuous);
        b.add_var(var_name("Accept", id), VarKind::Binary);
    }
    let ordered = || all.iter().flat_map(|a| all.iter().filter(move |b| b.id != a.id).map(move |b| (*a, *b)));
    let upper = || all.iter().enumerate().flat_map(|(i, a)| all[i + 1..].iter().map(move |b| (*a, *b)));
    let mixed = || ordered().filter(|(a, b)| is_f(a) || is_f(b));
    for kind in ["Right", "Above", "OutIn", "InIn"] {
        for (a, c) in ordered() {
            b.add_var(pair_name(kind, &a.id, &c.id), VarKind::Binary);
        }
    }
    for (a, c) in upper() {
        b.add_var(pair_name("OutOut", &a.id, &c.id), VarKind::Binary);
    }
    for (a, c) in mixed() {
        b.add_var(pair_name("InOut", &a.id, &c.id), VarKind::Binary);
    }

    for c in &cur {
        let id = &c.id;
        b.fix(&var_name("Accept", id), 1.0, var_name("fix19_accept", id));
        b.fix(&var_name("X", id), c.x_init.unwrap_or(0.0), var_name("fix20_x", id));
        b.fix(&var_name("Y", id), c.y_init.unwrap_or(0.0), var_name("fix21_y", id));
        b.fix(&var_name("Rollin", id), 0.0, var_name("fix22_rollin", id));
        for f in &fut {
            b.fix(&pair_name("InIn", id, &f.id), 1.0, pair_name("fix23_inin", id, &f.id));
            b.fix(&pair_name("InIn", &f.id, id), 0.0, pair_name("fix24_inin", &f.id, id));
        }
        for d in cur.iter().filter(|d| d.id != *id) {
            b.fix(&pair_name("InIn", id, &d.id), 1.0, pair_name("fix25_inin", id, &d.id));
        }
    }

    // Objective.
    for f in &fut {
        let id = &f.id;
        b.model.objective_constant += f.rejection_penalty();
        let terms = [
            (var_name("Accept", id), -f.rejection_penalty()),
            (var_name("DArr", id), f.arrival_penalty()),
            (var_name("X", id), h.eps_p),
            (var_name("Y", id), h.eps_p),
        ];
        for (n, c) in terms {
            let j = b.v(&n);
            b.model.objective.push((j, c));
        }
    }
    for a in &all {
        let j = b.v(&var_name("DDep", &a.id));
        b.model.objective.push((j, a.p_dep));
    }
    b.model.objective.retain(|&(_, c)| c != 0.0);

    let n = |k: &str, a: &AircraftSpec| var_name(k, &a.id);
    let p = |k: &str, a: &AircraftSpec, c: &AircraftSpec| pair_name(k, &a.id, &c.id);

    for f in &fut {
        let t = [
            (n("X", f), 1.0),
            (n("Y", f), 1.0),
            (n("Rollin", f), 1.0),
            (n("Rollout", f), 1.0),
            (n("DArr", f), 1.0),
            (n("DDep", f), 1.0),
            (n("Accept", f), -(mx + my + 4.0 * mt)),
        ];
        b.row(n("eq2_accept", f), &refs(&t), Sense::Le, 0.0);
    }
    for f in &fut {
        b.row(n("eq3_eta", f), &[(&n("Rollin", f), 1.0), (&n("Accept", f), -f.eta)], Sense::Ge, 0.0);
    }
    for a in &all {
        let t = [(n("Rollout", a), 1.0), (n("Rollin", a), -1.0), (n("Accept", a), -a.service)];
        b.row(n("eq4_servt", a), &refs(&t), Sense::Ge, 0.0);
    }
    for f in &fut {
        b.row(n("eq5_darr", f), &[(&n("DArr", f), 1.0), (&n("Rollin", f), -1.0)], Sense::Ge, -f.eta);
    }
    for a in &all {
        b.row(n("eq6_ddep", a), &[(&n("DDep", a), 1.0), (&n("Rollout", a), -1.0)], Sense::Ge, -a.etd);
    }
    for f in &fut {
        b.row(n("eq7_xmin", f), &[(&n("X", f), 1.0), (&n("Accept", f), -buf)], Sense::Ge, 0.0);
    }
    for f in &fut {
        b.row(n("eq8_xmax", f), &[(&n("X", f), 1.0), (&n("Accept", f), mx)], Sense::Le, h.hw - buf + mx - f.width);
    }
    for f in &fut {
        b.row(n("eq9_ymin", f), &[(&n("Y", f), 1.0), (&n("Accept", f), -buf)], Sense::Ge, 0.0);
    }
    for f in &fut {
        b.row(n("eq10_ymax", f), &[(&n("Y", f), 1.0), (&n("Accept", f), my)], Sense::Le, h.hl - buf + my - f.length);
    }
    for (a, c) in ordered() {
        let t = [(n("X", c), 1.0), (n("X", a), -1.0), (p("Right", a, c), mx)];
        b.row(p("eq11_right", a, c), &refs(&t), Sense::Le, mx - c.width - buf);
    }
    for (a, c) in ordered() {
        let t = [(n("Y", c), 1.0), (n("Y", a), -1.0), (p("Above", a, c), my)];
        b.row(p("eq12_above", a, c), &refs(&t), Sense::Le, my - c.length - buf);
    }
    for (a, c) in upper() {
        let t = [
            (p("Right", c, a), 1.0),
            (p("Right", a, c), 1.0),
            (p("Above", c, a), 1.0),
            (p("Above", a, c), 1.0),
            (p("OutIn", a, c), 1.0),
            (p("OutIn", c, a), 1.0),
            (n("Accept", a), -1.0),
            (n("Accept", c), -1.0),
        ];
        b.row(p("eq13_sep", a, c), &refs(&t), Sense::Ge, -1.0);
    }
    for (a, c) in ordered() {
        let t = [(n("Rollout", a), 1.0), (n("Rollin", c), -1.0), (p("OutIn", a, c), mt)];
        b.row(p("eq14_outin", a, c), &refs(&t), Sense::Le, mt - eps);
    }
    let fut_pairs = || fut.iter().flat_map(|f| fut.iter().filter(move |g| g.id != f.id).map(move |g| (*f, *g)));
    for (f, g) in fut_pairs() {
        let t = [
            (n("Rollin", g), 1.0),
            (n("Rollin", f), -1.0),
            (p("InIn", f, g), -mt),
            (n("Accept", f), -mt),
            (n("Accept", g), -mt),
        ];
        b.row(p("eq15_inin", f, g), &refs(&t), Sense::Ge, eps - 3.0 * mt);
    }
    for (f, g) in fut_pairs() {
        let t = [
            (n("Rollin", f), 1.0),
            (n("Rollin", g), -1.0),
            (p("InIn", f, g), mt),
            (n("Accept", f), -mt),
            (n("Accept", g), -mt),
        ];
        b.row(p("eq16_inin", f, g), &refs(&t), Sense::Ge, eps - 2.0 * mt);
    }
    for (a, c) in upper() {
        let t = [
            (n("Rollout", c), 1.0),
            (n("Rollout", a), -1.0),
            (p("OutOut", a, c), -mt),
            (n("Accept", a), -mt),
            (n("Accept", c), -mt),
        ];
        b.row(p("eq15b_outout", a, c), &refs(&t), Sense::Ge, eps - 3.0 * mt);
    }
    for (a, c) in upper() {
        let t = [
            (n("Rollout", a), 1.0),
            (n("Rollout", c), -1.0),
            (p("OutOut", a, c), mt),
            (n("Accept", a), -mt),
            (n("Accept", c), -mt),
        ];
        b.row(p("eq16b_outout", a, c), &refs(&t), Sense::Ge, eps - 2.0 * mt);
    }
    for (a, c) in mixed() {
        let t = [
            (n("Rollout", c), 1.0),
            (n("Rollin", a), -1.0),
            (p("InOut", a, c), -mt),
            (n("Accept", a), -mt),
            (n("Accept", c), -mt),
        ];
        b.row(p("eq16c_inout", a, c), &refs(&t), Sense::Ge, eps - 3.0 * mt);
    }
    for (a, c) in mixed() {
        let t = [
            (n("Rollin", a), 1.0),
            (n("Rollout", c), -1.0),
            (p("InOut", a, c), mt),
            (n("Accept", a), -mt),
            (n("Accept", c), -mt),
        ];
        b.row(p("eq16d_inout", a, c), &refs(&t), Sense::Ge, eps - 2.0 * mt);
    }
    for (a, c) in ordered() {
        let t = [
            (n("Rollout", a), 1.0),
            (n("Rollout", c), -1.0),
            (p("Above", c, a), -mt),
            (p("Right", a, c), mt),
            (p("Right", c, a), mt),
            (p("InIn", a, c), -mt),
        ];
        b.row(p("eq17_exitblock", a, c), &refs(&t), Sense::Ge, eps - 2.0 * mt);
    }
    for (a, c) in mixed() {
        let t = [
            (n("Rollin", a), 1.0),
            (n("Rollout", c), -1.0),
            (p("Above", c, a), -mt),
            (p("Right", a, c), mt),
            (p("Right", c, a), mt),
            (p("InIn", a, c), mt),
        ];
        b.row(p("eq18_entryblock", a, c), &refs(&t), Sense::Ge, eps - mt);
    }
    b.model
}

fn refs(t: &[(String, f64)]) -> Vec<(&str, f64)> {
    t.iter().map(|(n, c)| (n.as_str(), *c)).collect()
}

/// A violated row or bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowViolation {
    pub name: String,
    pub residual: f64,
}

impl RowViolation {
    pub fn family(&self) -> &str {
        family_of(&self.name)
    }
}

/// Every row, bound and integrality requirement violated at `point` by
/// more than the tolerance. Bound violations are named by their fixing
/// tag, or `dom_nonneg(<var>)` / `dom_binary(<var>)`.
pub fn check_satisfaction(model: &MilpModel, point: &Point) -> Result<Vec<RowViolation>> {
    let values = model.values(point)?;
    let mut out = Vec::new();
    for (v, &x) in model.variables.iter().zip(&values) {
        let miss = (v.lower - x).max(x - v.upper);
        if miss > TOL {
            let name = match &v.fix_tag {
                Some(tag) => tag.clone(),
                None if x < v.lower => var_name("dom_nonneg", &v.name),
                None => var_name("dom_binary", &v.name),
            };
            out.push(RowViolation { name, residual: miss });
        }
        if v.kind == VarKind::Binary {
            let frac = (x - x.round()).abs();
            if frac > TOL {
                out.push(RowViolation { name: var_name("dom_binary", &v.name), residual: frac });
            }
        }
    }
    for r in &model.rows {
        let res = r.residual(&values);
        if res > TOL {
            out.push(RowViolation { name: r.name.clone(), residual: res });
        }
    }
    Ok(out)
}

/// Objective value at `point`, constant included.
pub fn objective_value(model: &MilpModel, point: &Point) -> Result<f64> {
    let values = model.values(point)?;
    Ok(model.objective_constant + model.objective.iter().map(|&(j, c)| c * values[j]).sum::<f64>())
}

fn before(t1: f64, t2: f64, what: impl FnOnce() -> String) -> Result<bool> {
    if (t1 - t2).abs() <= TOL {
        return Err(Error::AmbiguousOrder(what()));
    }
    Ok(t1 < t2)
}

/// Completes a plan into a full variable point.
///
/// Relative position binaries are set only for accepted pairs whose stays
/// overlap; pairs that never share the hangar are separated in time alone.
/// Order binaries follow the strict order of the events. Every binary
/// involving a rejected aircraft is 0 unless fixed by a bound.
pub fn derive_binaries(model: &MilpModel, instance: &Instance, solution: &Solution) -> Result<Point> {
    let rows = solution.aligned(instance)?;
    let eps = instance.hangar.eps_t;
    let buf = instance.hangar.buffer;
    let mut point: Point = model.variables.iter().map(|v| (v.name.clone(), v.lower)).collect();
    let mut set = |name: String, value: f64| {
        if let Some(slot) = point.get_mut(&name) {
            *slot = value;
        }
    };

    struct Row<'a> {
        spec: &'a AircraftSpec,
        asg: &'a Assignment,
        occ: Occupancy,
    }
    let rows: Vec<Row> = rows
        .into_iter()
        .map(|(spec, asg)| Row {
            spec,
            asg,
            occ: Occupancy {
                rect: Footprint::new(asg.x, asg.y, spec.width, spec.length),
                roll_in: asg.roll_in,
                roll_out: asg.roll_out,
                current: spec.is_current(),
            },
        })
        .collect();

    for r in &rows {
        let id = &r.spec.id;
        set(var_name("Accept", id), if r.asg.accept { 1.0 } else { 0.0 });
        if !r.asg.accept {
            for k in ["X", "Y", "Rollin", "Rollout", "DArr", "DDep"] {
                set(var_name(k, id), 0.0);
            }
            continue;
        }
        set(var_name("X", id), r.asg.x);
        set(var_name("Y", id), r.asg.y);
        set(var_name("Rollin", id), r.asg.roll_in);
        set(var_name("Rollout", id), r.asg.roll_out);
        if !r.spec.is_current() {
            set(var_name("DArr", id), (r.asg.roll_in - r.spec.eta).max(0.0));
        }
        set(var_name("DDep", id), (r.asg.roll_out - r.spec.etd).max(0.0));
    }

    for (i, ra) in rows.iter().enumerate() {
        for (k, rb) in rows.iter().enumerate() {
            if i == k || !(ra.asg.accept && rb.asg.accept) {
                continue;
            }
            let (a, b) = (&ra.spec.id, &rb.spec.id);
            let (oa, ob) = (&ra.occ, &rb.occ);
            let bit = |x: bool| if x { 1.0 } else { 0.0 };
            if oa.overlaps(ob) {
                set(pair_name("Right", a, b), bit(oa.rect.right_of(&ob.rect, buf)));
                set(pair_name("Above", a, b), bit(oa.rect.above(&ob.rect, buf)));
            }
            set(pair_name("OutIn", a, b), bit(oa.roll_out + eps <= ob.roll_in + TOL));
            let what = |ea: &'static str, eb: &'static str| move || format!("{ea} of {a} and {eb} of {b}");
            if !oa.current && !ob.current {
                set(pair_name("InIn", a, b), bit(before(oa.roll_in, ob.roll_in, what("roll-in", "roll-in"))?));
            }
            if i < k {
                set(pair_name("OutOut", a, b), bit(before(oa.roll_out, ob.roll_out, what("roll-out", "roll-out"))?));
            }
            if !(oa.current && ob.current) {
                set(pair_name("InOut", a, b), bit(before(oa.roll_in, ob.roll_out, what("roll-in", "roll-out"))?));
            }
        }
    }
    Ok(point)
}
