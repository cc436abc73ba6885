getProduction(java.lang.String) { 
 return productionsByName.get(name); }  
testJustifications() { 
 runTest("testJustifications", 2); org.jsoar.kernel.Production j = agent.getProductions() .getProduction("justification-1"); "<AssertPlaceHolder>"; 
}
