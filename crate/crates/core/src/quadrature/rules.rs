//! Gauss-Kronrod node/weight tables (QUADPACK values).

/// Nested 7-point Gauss / 15-point Kronrod pair on `[-1, 1]`, expanded to the
/// full symmetric node set.
#[derive(Debug, Clone)]
pub struct GkRule {
    pub nodes: Vec<f64>,
    pub kronrod: Vec<f64>,
    /// Gauss weights on the same nodes, zero where a node is Kronrod-only.
    pub gauss: Vec<f64>,
}

const XGK15: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK15: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK15[1], [3], [5], [7].
const WG7: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const XGK31: [f64; 16] = [
    0.998002298693397060285172840152271,
    0.987992518020485428489565718586613,
    0.967739075679139134257347978784337,
    0.937273392400705904307758947710209,
    0.897264532344081900882509656454496,
    0.848206583410427216200648320774217,
    0.790418501442465932967649294817947,
    0.724417731360170047416186054613938,
    0.650996741297416970533735895313275,
    0.570972172608538847537226737253911,
    0.485081863640239680693655740232351,
    0.394151347077563369897207370981045,
    0.299180007153168812166780024266389,
    0.201194093997434522300628303394596,
    0.101142066918717499027074231447392,
    0.000000000000000000000000000000000,
];

const WGK31: [f64; 16] = [
    0.005377479872923348987792051430128,
    0.015007947329316122538374763075807,
    0.025460847326715320186874001019653,
    0.035346360791375846222037948478360,
    0.044589751324764876608227299373280,
    0.053481524690928087265343147239430,
    0.062009567800670640285139230960803,
    0.069854121318728258709520077099147,
    0.076849680757720378894432777482659,
    0.083080502823133021038289247286104,
    0.088564443056211770647275443693774,
    0.093126598170825321225486872747346,
    0.096642726983623678505179907627589,
    0.099173598721791959332393173484603,
    0.100769845523875595044946662617570,
    0.101330007014791549017374792767493,
];

// Gauss weights for XGK31[1], [3], ..., [15].
const WG15: [f64; 8] = [
    0.030753241996117268354628393577204,
    0.070366047488108124709267416450667,
    0.107159220467171935011869546685869,
    0.139570677926154314447804794511028,
    0.166269205816993933553200860481209,
    0.186161000015562211026800561866423,
    0.198431485327111576456118326443839,
    0.202578241925561272880620199967519,
];

fn expand(x: &[f64], wk: &[f64], wg: &[f64]) -> GkRule {
    let half = x.len();
    let mut nodes = Vec::with_capacity(2 * half - 1);
    let mut kronrod = Vec::with_capacity(2 * half - 1);
    let mut gauss = Vec::with_capacity(2 * half - 1);
    let gw = |i: usize| if i % 2 == 1 { wg[i / 2] } else { 0.0 };
    for i in 0..half {
        nodes.push(-x[i]);
        kronrod.push(wk[i]);
        gauss.push(gw(i));
    }
    for i in (0..half - 1).rev() {
        nodes.push(x[i]);
        kronrod.push(wk[i]);
        gauss.push(gw(i));
    }
    GkRule {
        nodes,
        kronrod,
        gauss,
    }
}

impl GkRule {
    pub fn g7k15() -> Self {
        expand(&XGK15, &WGK15, &WG7)
    }

    pub fn g15k31() -> Self {
        expand(&XGK31, &WGK31, &WG15)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_polynomials() {
        for rule in [GkRule::g7k15(), GkRule::g15k31()] {
            let n = rule.len();
            let sk: f64 = rule.kronrod.iter().sum();
            let sg: f64 = rule.gauss.iter().sum();
            assert!((sk - 2.0).abs() < 1e-14 && (sg - 2.0).abs() < 1e-14);
            // the (n-1)/2-point Gauss part is exact to degree n - 2; test the even degree n - 3
            let deg = n - 3;
            let gk: f64 = rule.nodes.iter().zip(&rule.gauss).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((gk - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13);
        }
    }
}
