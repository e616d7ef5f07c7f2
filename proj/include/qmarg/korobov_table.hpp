#pragma once

// Bundled CBC-optimized generating vectors for unweighted (gamma = 1)
// Korobov lattices, N a power of two, up to 16 dimensions. Regenerate with
// tools/make_lattice_table; data/korobov_table.json mirrors this table.

#include <cstdint>
#include <optional>
#include <vector>

#include "qmarg/point_set.hpp"

namespace qmarg {

struct KorobovTableEntry {
    std::uint64_t N;
    std::vector<std::uint64_t> z;   // 16 components, CBC order
    std::vector<double> e2;         // worst-case error^2 after each coordinate
};

inline const std::vector<KorobovTableEntry>& korobovTable() {
    static const std::vector<KorobovTableEntry> table = {
        {256ull,
         {1ull, 99ull, 27ull, 11ull, 3ull, 51ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull},
         {5.01994038952791044e-05, 2.48180525072605462e-03, 6.14544891990398412e-02, 6.32603793312142892e-01, 4.17412527652033472e+00, 2.12399385554425457e+01, 9.52886459432088628e+01, 4.15065416317564768e+02, 1.79568953398043982e+03, 7.75169519600897183e+03, 3.34295525167368760e+04, 1.44068927860741795e+05, 6.20538426276162965e+05, 2.67152155177327804e+06, 1.14965468488607239e+07, 4.94559661993515193e+07}},
        {512ull,
         {1ull, 189ull, 147ull, 211ull, 81ull, 217ull, 161ull, 189ull, 189ull, 189ull, 189ull, 189ull, 189ull, 27ull, 27ull, 27ull},
         {1.25498509735422203e-05, 7.21156334481554140e-04, 1.94576281768095161e-02, 2.45023416751261047e-01, 1.75841812897956729e+00, 9.73655808134939882e+00, 4.60994838355062981e+01, 2.06361621287605715e+02, 8.95767687419344952e+02, 3.87582668032129277e+03, 1.67329449861566318e+04, 7.21622089879078558e+04, 3.10968158744113171e+05, 1.33923053595323488e+06, 5.75521919295057375e+06, 2.47118066172667518e+07}},
        {1024ull,
         {1ull, 275ull, 167ull, 71ull, 471ull, 143ull, 333ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull, 1ull},
         {3.13746274405168890e-06, 1.95518997100574410e-04, 6.16004934683522798e-03, 8.56249036646967721e-02, 7.36103048659669801e-01, 4.54198520693624186e+00, 2.19028821608822959e+01, 9.91092099870892298e+01, 4.35946565018810190e+02, 1.90447658267604766e+03, 8.28300658268279585e+03, 3.59112923008833750e+04, 1.55331860999737459e+05, 6.70716139050370315e+05, 2.89239375624763919e+06, 1.24610643034333475e+07}},
        {2048ull,
         {1ull, 857ull, 269ull, 497ull, 185ull, 165ull, 825ull, 165ull, 165ull, 165ull, 165ull, 165ull, 165ull, 165ull, 165ull, 165ull},
         {7.84365686179455679e-07, 5.34898031780972616e-05, 2.03371417008924027e-03, 3.03373129738226943e-02, 3.07288795355877165e-01, 2.01177576932413116e+00, 1.04806133796772460e+01, 4.90950854742642235e+01, 2.14383465623353089e+02, 9.28379081299709810e+02, 4.00798015499154690e+03, 1.72870166882428966e+04, 7.45245574416774616e+04, 3.21160195546924602e+05, 1.38358846197391930e+06, 5.95889478726511076e+06}},
        {4096ull,
         {1ull, 1557ull, 1741ull, 1031ull, 363ull, 1705ull, 1349ull, 1667ull, 1705ull, 1705ull, 1705ull, 1705ull, 1705ull, 1705ull, 1705ull, 687ull},
         {1.96091422655086944e-07, 1.40495248104333115e-05, 6.46843567754906701e-04, 1.13184261757106608e-02, 1.19170978793254001e-01, 8.64023009375054052e-01, 4.79897443485976627e+00, 2.33566451052854234e+01, 1.06639446707667943e+02, 4.67673522029148216e+02, 2.03792020776545746e+03, 8.84269218323951645e+03, 3.82728388566558424e+04, 1.65347858834421204e+05, 7.13367661401718273e+05, 3.07138905024827272e+06}},
        {8192ull,
         {1ull, 3455ull, 1967ull, 1029ull, 4085ull, 3963ull, 4049ull, 3067ull, 3067ull, 3067ull, 3067ull, 3067ull, 3067ull, 3067ull, 3067ull, 3067ull},
         {4.90228468930098416e-08, 3.88497738135207271e-06, 1.61018402367485436e-04, 3.88536948062179199e-03, 4.68584304132126928e-02, 3.76628457290089314e-01, 2.21633653943970232e+00, 1.13803507638054562e+01, 5.20793542582640114e+01, 2.26884723633178538e+02, 9.81603108756625829e+02, 4.23889909198045461e+03, 1.82946370175751290e+04, 7.89218137861911964e+04, 3.40310362726712076e+05, 1.46677096198048303e+06}},
        {16384ull,
         {1ull, 6915ull, 3959ull, 7595ull, 6297ull, 1183ull, 2821ull, 8191ull, 1683ull, 3959ull, 3959ull, 3959ull, 3959ull, 3959ull, 3959ull, 3959ull},
         {1.22557104464959821e-08, 9.99026060544139227e-07, 4.75323331263766136e-05, 1.34331015402278098e-03, 1.69453404620183434e-02, 1.52807855002951909e-01, 9.88975619976146803e-01, 5.30704712500967624e+00, 2.56499544026834876e+01, 1.14988925395972203e+02, 5.01733282655367304e+02, 2.17650434411310744e+03, 9.41576803798177207e+03, 4.06748429443574423e+04, 1.75535815986461210e+05, 7.56967199591818731e+05}},
        {32768ull,
         {1ull, 12545ull, 3665ull, 10015ull, 9493ull, 14563ull, 5719ull, 15861ull, 7933ull, 7931ull, 15861ull, 7931ull, 7931ull, 7931ull, 7931ull, 7931ull},
         {3.06393577176322651e-09, 2.63416347845435439e-07, 1.62460737440639491e-05, 4.48233941956699411e-04, 6.59786439047360673e-03, 6.24374865942456392e-02, 4.18290043695056957e-01, 2.43420033891132892e+00, 1.17217642437591625e+01, 5.40405235311112051e+01, 2.38200657070414991e+02, 1.03855141333995743e+03, 4.48937006282294169e+03, 1.93673985796599009e+04, 8.34898856973509100e+04, 3.59788020902159973e+05}},
        {65536ull,
         {1ull, 25015ull, 5425ull, 24095ull, 15951ull, 12875ull, 12445ull, 19985ull, 14897ull, 20845ull, 14897ull, 14897ull, 14897ull, 14897ull, 14897ull, 14897ull},
         {7.65979280004103202e-10, 7.09901240014687573e-08, 4.44585672676467425e-06, 1.45418127683649701e-04, 2.33917614525758211e-03, 2.40778055150203674e-02, 1.89617397439160618e-01, 1.13576343478763375e+00, 5.84743835795858313e+00, 2.72740802933013597e+01, 1.21391697436586227e+02, 5.27814073347524413e+02, 2.28259773537365891e+03, 9.85680946955470426e+03, 4.25378773954843418e+04, 1.83499939694862696e+05}},
        {131072ull,
         {1ull, 50687ull, 7637ull, 38773ull, 16093ull, 13037ull, 27383ull, 30479ull, 43445ull, 44901ull, 63797ull, 44901ull, 44901ull, 44901ull, 44901ull, 44901ull},
         {1.91501481339173552e-10, 1.90556657120311002e-08, 1.35723245686669713e-06, 4.57178118771217612e-05, 8.60965302325045201e-04, 9.48976604660756173e-03, 8.05889071883740815e-02, 5.10684691517732769e-01, 2.78013058853610540e+00, 1.33841016075669241e+01, 6.11979654679460268e+01, 2.70135308617666965e+02, 1.17597343600559770e+03, 5.09813689796536346e+03, 2.20489747051416962e+04, 9.52039647415283835e+04}},
        {262144ull,
         {1ull, 100135ull, 28235ull, 39865ull, 25937ull, 127279ull, 60735ull, 85271ull, 111087ull, 36177ull, 3793ull, 36177ull, 36177ull, 36177ull, 36177ull, 36177ull},
         {4.78777018031451007e-11, 5.05817121521090485e-09, 3.72310143159637619e-07, 1.42832563609918139e-05, 2.99385062715762373e-04, 3.63677592860067733e-03, 3.35086375761910471e-02, 2.28405811486457333e-01, 1.27101350033500848e+00, 6.39017497145780045e+00, 2.93037929708593623e+01, 1.29997012885916632e+02, 5.65956872427635290e+02, 2.45403949896749782e+03, 1.06198478969771586e+04, 4.58948569391331694e+04}},
    };
    return table;
}

/// Table lookup: the s-component prefix of the stored vector (CBC prefixes
/// are themselves CBC optima for the same weights).
inline std::optional<GeneratingVector> tableGeneratingVector(std::uint64_t N, std::size_t s) {
    for (const auto& entry : korobovTable())
        if (entry.N == N && s <= entry.z.size())
            return GeneratingVector(
                std::vector<std::uint64_t>(entry.z.begin(), entry.z.begin() + s), N);
    return std::nullopt;
}

}  // namespace qmarg
