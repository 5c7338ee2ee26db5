#include "spiralx/stem.hpp"

namespace spiralx {

// 256-entry TURBO lookup table, RGB in [0,1]. Generated once from the
// published quintic fit of the Turbo colormap and frozen here as data.
const float kTurboTable[256][3] = {
    {0.135721f, 0.091403f, 0.106673f},
    {0.153173f, 0.100081f, 0.155325f},
    {0.169359f, 0.108903f, 0.202152f},
    {0.184328f, 0.117864f, 0.247195f},
    {0.198124f, 0.126958f, 0.290492f},
    {0.210791f, 0.136182f, 0.332082f},
    {0.222375f, 0.145528f, 0.372001f},
    {0.232919f, 0.154994f, 0.410287f},
    {0.242464f, 0.164573f, 0.446978f},
    {0.251052f, 0.174260f, 0.482108f},
    {0.258724f, 0.184052f, 0.515714f},
    {0.265519f, 0.193942f, 0.547831f},
    {0.271477f, 0.203927f, 0.578494f},
    {0.276636f, 0.214000f, 0.607737f},
    {0.281034f, 0.224158f, 0.635593f},
    {0.284706f, 0.234396f, 0.662097f},
    {0.287690f, 0.244709f, 0.687281f},
    {0.290020f, 0.255091f, 0.711176f},
    {0.291730f, 0.265540f, 0.733817f},
    {0.292855f, 0.276049f, 0.755232f},
    {0.293426f, 0.286614f, 0.775455f},
    {0.293477f, 0.297230f, 0.794515f},
    {0.293039f, 0.307894f, 0.812442f},
    {0.292142f, 0.318600f, 0.829267f},
    {0.290816f, 0.329344f, 0.845018f},
    {0.289091f, 0.340122f, 0.859723f},
    {0.286994f, 0.350929f, 0.873413f},
    {0.284555f, 0.361760f, 0.886113f},
    {0.281799f, 0.372612f, 0.897853f},
    {0.278754f, 0.383479f, 0.908658f},
    {0.275445f, 0.394358f, 0.918556f},
    {0.271897f, 0.405245f, 0.927573f},
    {0.268135f, 0.416134f, 0.935734f},
    {0.264182f, 0.427023f, 0.943065f},
    {0.260062f, 0.437906f, 0.949591f},
    {0.255796f, 0.448779f, 0.955337f},
    {0.251408f, 0.459639f, 0.960325f},
    {0.246917f, 0.470481f, 0.964581f},
    {0.242344f, 0.481302f, 0.968128f},
    {0.237710f, 0.492097f, 0.970989f},
    {0.233033f, 0.502862f, 0.973185f},
    {0.228332f, 0.513594f, 0.974740f},
    {0.223626f, 0.524288f, 0.975674f},
    {0.218931f, 0.534941f, 0.976010f},
    {0.214265f, 0.545549f, 0.975769f},
    {0.209644f, 0.556108f, 0.974970f},
    {0.205083f, 0.566614f, 0.973635f},
    {0.200598f, 0.577064f, 0.971782f},
    {0.196204f, 0.587454f, 0.969433f},
    {0.191913f, 0.597781f, 0.966605f},
    {0.187741f, 0.608040f, 0.963318f},
    {0.183699f, 0.618228f, 0.959589f},
    {0.179801f, 0.628342f, 0.955438f},
    {0.176058f, 0.638378f, 0.950881f},
    {0.172480f, 0.648333f, 0.945936f},
    {0.169080f, 0.658204f, 0.940620f},
    {0.165868f, 0.667986f, 0.934950f},
    {0.162852f, 0.677678f, 0.928941f},
    {0.160044f, 0.687275f, 0.922611f},
    {0.157450f, 0.696774f, 0.915974f},
    {0.155080f, 0.706172f, 0.909046f},
    {0.152942f, 0.715467f, 0.901841f},
    {0.151042f, 0.724654f, 0.894375f},
    {0.149388f, 0.733732f, 0.886662f},
    {0.147987f, 0.742696f, 0.878716f},
    {0.146843f, 0.751544f, 0.870549f},
    {0.145964f, 0.760273f, 0.862177f},
    {0.145353f, 0.768880f, 0.853611f},
    {0.145015f, 0.777363f, 0.844865f},
    {0.144956f, 0.785718f, 0.835950f},
    {0.145178f, 0.793943f, 0.826880f},
    {0.145685f, 0.802035f, 0.817665f},
    {0.146480f, 0.809992f, 0.808318f},
    {0.147565f, 0.817811f, 0.798849f},
    {0.148944f, 0.825489f, 0.789270f},
    {0.150617f, 0.833024f, 0.779591f},
    {0.152586f, 0.840413f, 0.769823f},
    {0.154852f, 0.847654f, 0.759975f},
    {0.157416f, 0.854745f, 0.750058f},
    {0.160279f, 0.861683f, 0.740081f},
    {0.163440f, 0.868467f, 0.730053f},
    {0.166898f, 0.875093f, 0.719983f},
    {0.170654f, 0.881560f, 0.709880f},
    {0.174706f, 0.887866f, 0.699752f},
    {0.179053f, 0.894008f, 0.689608f},
    {0.183693f, 0.899985f, 0.679456f},
    {0.188624f, 0.905794f, 0.669303f},
    {0.193844f, 0.911435f, 0.659156f},
    {0.199350f, 0.916903f, 0.649023f},
    {0.205140f, 0.922200f, 0.638911f},
    {0.211209f, 0.927321f, 0.628826f},
    {0.217556f, 0.932266f, 0.618775f},
    {0.224175f, 0.937033f, 0.608764f},
    {0.231064f, 0.941620f, 0.598800f},
    {0.238217f, 0.946026f, 0.588887f},
    {0.245631f, 0.950249f, 0.579032f},
    {0.253300f, 0.954288f, 0.569239f},
    {0.261220f, 0.958142f, 0.559514f},
    {0.269384f, 0.961809f, 0.549861f},
    {0.277789f, 0.965288f, 0.540286f},
    {0.286428f, 0.968577f, 0.530793f},
    {0.295294f, 0.971677f, 0.521385f},
    {0.304383f, 0.974584f, 0.512068f},
    {0.313688f, 0.977299f, 0.502844f},
    {0.323202f, 0.979820f, 0.493717f},
    {0.332918f, 0.982147f, 0.484692f},
    {0.342831f, 0.984279f, 0.475770f},
    {0.352931f, 0.986214f, 0.466956f},
    {0.363214f, 0.987952f, 0.458251f},
    {0.373670f, 0.989493f, 0.449659f},
    {0.384293f, 0.990835f, 0.441182f},
    {0.395074f, 0.991979f, 0.432823f},
    {0.406007f, 0.992923f, 0.424583f},
    {0.417082f, 0.993667f, 0.416464f},
    {0.428293f, 0.994210f, 0.408469f},
    {0.439630f, 0.994553f, 0.400598f},
    {0.451085f, 0.994695f, 0.392854f},
    {0.462651f, 0.994636f, 0.385238f},
    {0.474317f, 0.994376f, 0.377750f},
    {0.486077f, 0.993914f, 0.370392f},
    {0.497920f, 0.993251f, 0.363165f},
    {0.509839f, 0.992386f, 0.356069f},
    {0.521824f, 0.991319f, 0.349105f},
    {0.533866f, 0.990052f, 0.342273f},
    {0.545956f, 0.988583f, 0.335573f},
    {0.558086f, 0.986914f, 0.329006f},
    {0.570246f, 0.985044f, 0.322572f},
    {0.582427f, 0.982974f, 0.316270f},
    {0.594619f, 0.980705f, 0.310100f},
    {0.606814f, 0.978236f, 0.304063f},
    {0.619002f, 0.975569f, 0.298156f},
    {0.631174f, 0.972704f, 0.292380f},
    {0.643321f, 0.969642f, 0.286734f},
    {0.655433f, 0.966384f, 0.281218f},
    {0.667501f, 0.962930f, 0.275829f},
    {0.679516f, 0.959281f, 0.270567f},
    {0.691468f, 0.955439f, 0.265431f},
    {0.703349f, 0.951404f, 0.260420f},
    {0.715149f, 0.947178f, 0.255532f},
    {0.726858f, 0.942762f, 0.250766f},
    {0.738468f, 0.938157f, 0.246121f},
    {0.749970f, 0.933364f, 0.241593f},
    {0.761355f, 0.928384f, 0.237183f},
    {0.772613f, 0.923220f, 0.232888f},
    {0.783736f, 0.917872f, 0.228706f},
    {0.794715f, 0.912343f, 0.224635f},
    {0.805541f, 0.906634f, 0.220674f},
    {0.816205f, 0.900746f, 0.216819f},
    {0.826700f, 0.894682f, 0.213070f},
    {0.837016f, 0.888443f, 0.209424f},
    {0.847145f, 0.882032f, 0.205877f},
    {0.857079f, 0.875449f, 0.202429f},
    {0.866810f, 0.868699f, 0.199077f},
    {0.876329f, 0.861781f, 0.195818f},
    {0.885630f, 0.854700f, 0.192650f},
    {0.894704f, 0.847456f, 0.189570f},
    {0.903543f, 0.840053f, 0.186576f},
    {0.912141f, 0.832493f, 0.183665f},
    {0.920490f, 0.824779f, 0.180834f},
    {0.928583f, 0.816912f, 0.178081f},
    {0.936413f, 0.808896f, 0.175404f},
    {0.943974f, 0.800734f, 0.172798f},
    {0.951258f, 0.792428f, 0.170262f},
    {0.958260f, 0.783981f, 0.167792f},
    {0.964973f, 0.775396f, 0.165387f},
    {0.971391f, 0.766676f, 0.163043f},
    {0.977510f, 0.757825f, 0.160757f},
    {0.983322f, 0.748845f, 0.158526f},
    {0.988824f, 0.739740f, 0.156348f},
    {0.994009f, 0.730513f, 0.154220f},
    {0.998873f, 0.721168f, 0.152139f},
    {1.000000f, 0.711708f, 0.150101f},
    {1.000000f, 0.702136f, 0.148106f},
    {1.000000f, 0.692457f, 0.146148f},
    {1.000000f, 0.682673f, 0.144226f},
    {1.000000f, 0.672790f, 0.142337f},
    {1.000000f, 0.662810f, 0.140479f},
    {1.000000f, 0.652738f, 0.138647f},
    {1.000000f, 0.642578f, 0.136840f},
    {1.000000f, 0.632334f, 0.135055f},
    {1.000000f, 0.622010f, 0.133289f},
    {1.000000f, 0.611610f, 0.131540f},
    {1.000000f, 0.601140f, 0.129805f},
    {1.000000f, 0.590602f, 0.128082f},
    {1.000000f, 0.580003f, 0.126367f},
    {1.000000f, 0.569345f, 0.124659f},
    {1.000000f, 0.558636f, 0.122955f},
    {1.000000f, 0.547878f, 0.121253f},
    {1.000000f, 0.537076f, 0.119550f},
    {1.000000f, 0.526237f, 0.117844f},
    {1.000000f, 0.515364f, 0.116134f},
    {1.000000f, 0.504464f, 0.114416f},
    {1.000000f, 0.493540f, 0.112690f},
    {1.000000f, 0.482599f, 0.110952f},
    {1.000000f, 0.471646f, 0.109201f},
    {1.000000f, 0.460686f, 0.107435f},
    {1.000000f, 0.449725f, 0.105653f},
    {0.999112f, 0.438769f, 0.103852f},
    {0.994229f, 0.427822f, 0.102032f},
    {0.989020f, 0.416892f, 0.100190f},
    {0.983491f, 0.405983f, 0.098326f},
    {0.977648f, 0.395103f, 0.096438f},
    {0.971497f, 0.384256f, 0.094524f},
    {0.965045f, 0.373449f, 0.092584f},
    {0.958299f, 0.362689f, 0.090617f},
    {0.951268f, 0.351981f, 0.088622f},
    {0.943958f, 0.341332f, 0.086598f},
    {0.936380f, 0.330749f, 0.084544f},
    {0.928542f, 0.320238f, 0.082460f},
    {0.920454f, 0.309806f, 0.080345f},
    {0.912126f, 0.299459f, 0.078200f},
    {0.903569f, 0.289205f, 0.076023f},
    {0.894795f, 0.279050f, 0.073816f},
    {0.885814f, 0.269002f, 0.071577f},
    {0.876640f, 0.259067f, 0.069308f},
    {0.867285f, 0.249254f, 0.067008f},
    {0.857762f, 0.239568f, 0.064678f},
    {0.848086f, 0.230018f, 0.062319f},
    {0.838272f, 0.220611f, 0.059931f},
    {0.828333f, 0.211355f, 0.057516f},
    {0.818286f, 0.202257f, 0.055074f},
    {0.808147f, 0.193325f, 0.052607f},
    {0.797932f, 0.184568f, 0.050116f},
    {0.787660f, 0.175992f, 0.047603f},
    {0.777348f, 0.167606f, 0.045069f},
    {0.767015f, 0.159419f, 0.042517f},
    {0.756680f, 0.151438f, 0.039948f},
    {0.746362f, 0.143672f, 0.037365f},
    {0.736083f, 0.136129f, 0.034770f},
    {0.725863f, 0.128818f, 0.032166f},
    {0.715724f, 0.121747f, 0.029555f},
    {0.705688f, 0.114926f, 0.026941f},
    {0.695779f, 0.108362f, 0.024327f},
    {0.686019f, 0.102066f, 0.021715f},
    {0.676434f, 0.096045f, 0.019111f},
    {0.667048f, 0.090309f, 0.016516f},
    {0.657887f, 0.084868f, 0.013936f},
    {0.648977f, 0.079731f, 0.011374f},
    {0.640346f, 0.074906f, 0.008836f},
    {0.632020f, 0.070404f, 0.006324f},
    {0.624029f, 0.066234f, 0.003845f},
    {0.616402f, 0.062406f, 0.001403f},
    {0.609168f, 0.058930f, 0.000000f},
    {0.602358f, 0.055815f, 0.000000f},
    {0.596003f, 0.053072f, 0.000000f},
    {0.590136f, 0.050710f, 0.000000f},
    {0.584789f, 0.048741f, 0.000000f},
    {0.579996f, 0.047174f, 0.000000f},
    {0.575791f, 0.046019f, 0.000000f},
    {0.572209f, 0.045288f, 0.000000f},
    {0.569285f, 0.044990f, 0.000000f},
    {0.567057f, 0.045137f, 0.000000f},
    {0.565562f, 0.045740f, 0.000000f},
    {0.564838f, 0.046808f, 0.000000f},
    {0.564924f, 0.048354f, 0.000000f},
    {0.565859f, 0.050389f, 0.000000f},
};

} // namespace spiralx
