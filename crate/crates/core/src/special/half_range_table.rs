// Recurrence coefficients for exp(-x^2) on [0, inf), computed in 300-digit
// arithmetic by tools/half_range_coefficients.py. `plcrf quadtable regen`
// recomputes them in double precision and checks the two agree.

/// Recurrence coefficients `alpha_k` of the monic polynomials orthogonal for
/// `exp(-x^2)` on `[0, inf)`.
pub(crate) const HALF_RANGE_ALPHA: [f64; 64] = [
    0.5641895835477563,
    0.9884253928468003,
    1.28596761936394,
    1.5247208440801152,
    1.7301922743094393,
    1.9134998431431025,
    2.080620336400833,
    2.235228380504639,
    2.3797824435046375,
    2.5160256434438666,
    2.645247925056953,
    2.7684359535042558,
    2.8863645940326945,
    2.9996556533536034,
    3.10881717592492,
    3.214270636071128,
    3.3163702970830875,
    3.415417332413339,
    3.5116703446156294,
    3.6053533459055664,
    3.6966619115045907,
    3.785767992700225,
    3.8728237301852215,
    3.9579645104229995,
    4.0413114410343915,
    4.122973374779628,
    4.203048578872002,
    4.281626122768204,
    4.358787040389889,
    4.434605310041297,
    4.509148685807793,
    4.582479407059627,
    4.654654807220995,
    4.7257278387550175,
    4.795747528043545,
    4.864759371276861,
    4.9328056804434945,
    4.999925886899688,
    5.066156808707958,
    5.131532886894297,
    5.196086394930197,
    5.259847625057811,
    5.322845054512435,
    5.385105494231548,
    5.44665422225443,
    5.5075151036958845,
    5.567710698909693,
    5.62726236123252,
    5.6861903255095045,
    5.744513788442437,
    5.802250981665299,
    5.859419238335945,
    5.9160350539335615,
    5.972114141866467,
    6.02767148442167,
    6.082721379524431,
    6.137277483721482,
    6.191352851754101,
    6.2449599730460275,
    6.29811080539519,
    6.350816806126803,
    6.403088960937774,
    6.454937810638176,
    6.5063734759741765,
];

/// Recurrence coefficients `beta_k`; `beta_0` is the total mass `sqrt(pi)/2`.
pub(crate) const HALF_RANGE_BETA: [f64; 64] = [
    0.886226925452758,
    0.18169011381620934,
    0.3413251289594392,
    0.5049621529880016,
    0.6702641946396191,
    0.8361704992803111,
    1.0023478510110109,
    1.1686711647442727,
    1.3350829222423353,
    1.5015525993447618,
    1.668062362188116,
    1.8346010527937677,
    2.0011613185512136,
    2.1677381117632644,
    2.3343278495405015,
    2.5009279171337027,
    2.667536360957202,
    2.8341516916678327,
    3.000772753782719,
    3.167398636964427,
    3.33402861420311,
    3.5006620978281147,
    3.667298607618395,
    3.833937747295832,
    4.0005791869361955,
    4.167222649628333,
    4.333867901229951,
    4.500514742412094,
    4.667163002416825,
    4.833812534112328,
    5.000463210041203,
    5.1671149192366475,
    5.333767564637804,
    5.500421060976677,
    5.667075333039157,
    5.833730314225067,
    6.00038594534889,
    6.167042173635499,
    6.333698951874868,
    6.500356237707133,
    6.667013993015154,
    6.8336721834061525,
    7.000330777767558,
    7.166989747884958,
    7.333649068112232,
    7.500308715085758,
    7.6669686674759525,
    7.833628905770584,
    8.000289412085218,
    8.166950169996895,
    8.33361116439782,
    8.500272381366253,
    8.666933808052361,
    8.833595432576965,
    9.000257243941583,
    9.16691923194828,
    9.33358138712813,
    9.500243700677196,
    9.666906164399162,
    9.833568770653795,
    10.000231512310556,
    10.166894382706802,
    10.33355737561001,
    10.500220485183622,
];
