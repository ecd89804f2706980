"""Design the food-mixing chart and replay the 15 stored Phase II samples."""
from rzchart.chart import design_chart
from rzchart.scenarios import FOOD_ALPHA, FOOD_N, food_model
from rzchart.simulate import replay_example


def main():
    design = design_chart(food_model(), FOOD_N, alpha=FOOD_ALPHA)
    st = design.in_control_stats
    print(f"gamma_xbar={st.gamma_xbar:.6f} gamma_ybar={st.gamma_ybar:.6f} rho_bar={st.rho_bar:.6f}")
    print(f"LCL={design.lcl:.7f} UCL={design.ucl:.7f}")
    print("sample  xbar      ybar      zbar     printed  verdict")
    for row in replay_example(design):
        print(f"{row.sample:>6}  {row.xbar:.4f}  {row.ybar:.4f}  {row.zbar:.5f}  {row.published_zbar:>7}  "
              f"{row.verdict.value}")


if __name__ == "__main__":
    main()
